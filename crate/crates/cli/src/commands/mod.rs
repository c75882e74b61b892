pub mod deltaf;
pub mod exact;
pub mod mc;
pub mod mc_scan;
pub mod onsager;
pub mod rg;
pub mod topo;
pub mod transfer;
