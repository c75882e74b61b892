//! Randomized invariants across the library: symmetries, round-trips, and
//! cross-checks that hold for every input, not just curated examples.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use torus_ising::enumerate::{partition_split, HamiltonianMode};
use torus_ising::lattice::{
    bond_sum, boundary_matched, build_lattice, BoundaryCondition, Orientation, SpinConfig,
};
use torus_ising::mc::{
    chi_squared_critical, estimate, merge_small_buckets, wolff_step, Algorithm, ChainParams,
    ObservableSeries,
};
use torus_ising::scalar::{log_add_exp, log_sum_exp};
use torus_ising::topology::{compose_loops, loop_class, LatticeLoop, SpinField, Step, WindingPair};
use torus_ising::transfer::TransferOperator;

fn any_bc() -> impl Strategy<Value = BoundaryCondition> {
    prop_oneof![
        Just(BoundaryCondition::Open),
        Just(BoundaryCondition::Torus)
    ]
}

fn config_from_seed(l: usize, seed: u64) -> SpinConfig {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    SpinConfig::random(l, &mut rng)
}

/// A loop with winding class exactly `(m, n)` on side `l`: the wraps first,
/// then a random Z²-closed detour.
fn wound_loop(start: (i64, i64), l: usize, m: i64, n: i64, detour: &[u8]) -> LatticeLoop {
    let mut steps = Vec::new();
    let horiz = if m >= 0 { Step::PlusX } else { Step::MinusX };
    for _ in 0..(m.unsigned_abs() as usize) * l {
        steps.push(horiz);
    }
    let vert = if n >= 0 { Step::PlusY } else { Step::MinusY };
    for _ in 0..(n.unsigned_abs() as usize) * l {
        steps.push(vert);
    }
    let mut dx = 0i64;
    let mut dy = 0i64;
    for &b in detour {
        let s = match b % 4 {
            0 => Step::PlusX,
            1 => Step::MinusX,
            2 => Step::PlusY,
            _ => Step::MinusY,
        };
        let (ddx, ddy) = s.displacement();
        dx += ddx;
        dy += ddy;
        steps.push(s);
    }
    for _ in 0..dx.abs() {
        steps.push(if dx > 0 { Step::MinusX } else { Step::PlusX });
    }
    for _ in 0..dy.abs() {
        steps.push(if dy > 0 { Step::MinusY } else { Step::PlusY });
    }
    if steps.is_empty() {
        steps.extend([Step::PlusX, Step::MinusX]);
    }
    LatticeLoop::new(start, steps).unwrap()
}

proptest! {
    #[test]
    fn bond_sum_is_global_flip_invariant(
        l in 2usize..7,
        bc in any_bc(),
        seed in any::<u64>(),
    ) {
        prop_assume!(l >= 3 || bc == BoundaryCondition::Open);
        let lattice = build_lattice(l, bc).unwrap();
        let config = config_from_seed(l, seed);
        let flipped = config.flipped();
        prop_assert_eq!(
            bond_sum(&lattice, &config).unwrap(),
            bond_sum(&lattice, &flipped).unwrap()
        );
    }

    #[test]
    fn bond_counts_and_degrees(l in 2usize..12, bc in any_bc()) {
        prop_assume!(l >= 3 || bc == BoundaryCondition::Open);
        let lattice = build_lattice(l, bc).unwrap();
        let expected = match bc {
            BoundaryCondition::Open => 2 * l * (l - 1),
            BoundaryCondition::Torus => 2 * l * l,
        };
        prop_assert_eq!(lattice.bonds().len(), expected);
        let adj = lattice.adjacency();
        for (site, nbrs) in adj.iter().enumerate() {
            let (x, y) = (site % l, site / l);
            let expected_deg = match bc {
                BoundaryCondition::Torus => 4,
                BoundaryCondition::Open => {
                    let ex = usize::from(x > 0) + usize::from(x < l - 1);
                    let ey = usize::from(y > 0) + usize::from(y < l - 1);
                    ex + ey
                }
            };
            prop_assert_eq!(nbrs.len(), expected_deg);
        }
    }

    #[test]
    fn config_text_round_trips(l in 2usize..9, bc in any_bc(), seed in any::<u64>()) {
        let config = config_from_seed(l, seed);
        let text = config.to_text(bc);
        let (back, back_bc) = SpinConfig::parse(&text).unwrap();
        prop_assert_eq!(back.spins(), config.spins());
        prop_assert_eq!(back_bc, bc);
    }

    #[test]
    fn boundary_match_agrees_with_definition(l in 2usize..7, seed in any::<u64>()) {
        let config = config_from_seed(l, seed);
        let expected = (0..l).all(|y| config.get(0, y) == config.get(l - 1, y))
            && (0..l).all(|x| config.get(x, 0) == config.get(x, l - 1));
        prop_assert_eq!(boundary_matched(&config, l).unwrap(), expected);
    }

    #[test]
    fn log_sum_exp_matches_direct_sum(
        terms in prop::collection::vec(-30.0f64..30.0, 1..40),
    ) {
        let direct = terms.iter().map(|t| t.exp()).sum::<f64>().ln();
        let stable = log_sum_exp(&terms);
        prop_assert!((stable - direct).abs() < 1e-9, "{stable} vs {direct}");
    }

    #[test]
    fn log_add_exp_is_commutative_and_dominates(a in -700.0f64..700.0, b in -700.0f64..700.0) {
        let ab = log_add_exp(a, b);
        let ba = log_add_exp(b, a);
        prop_assert!((ab - ba).abs() <= 1e-12 * ab.abs().max(1.0));
        prop_assert!(ab >= a.max(b));
        prop_assert!(ab <= a.max(b) + std::f64::consts::LN_2 + 1e-12);
    }

    #[test]
    fn partition_terms_recombine(k in 0.0f64..1.2, mode in prop_oneof![
        Just(HamiltonianMode::OpenH),
        Just(HamiltonianMode::TorusH),
    ]) {
        let split = partition_split(3, k, mode).unwrap();
        prop_assert!(split.log_q > split.log_q1);
        prop_assert!(split.recombination_error() < 1e-10);
    }

    #[test]
    fn transfer_matches_enumeration_at_random_couplings(
        k in 0.0f64..1.0,
        bc in any_bc(),
    ) {
        let mode = match bc {
            BoundaryCondition::Open => HamiltonianMode::OpenH,
            BoundaryCondition::Torus => HamiltonianMode::TorusH,
        };
        let op = TransferOperator::<f64>::new(3, bc, k).unwrap();
        let split = partition_split(3, k, mode).unwrap();
        let scale = split.log_q.abs().max(1.0);
        prop_assert!((op.log_z() - split.log_q).abs() < 1e-10 * scale);
        prop_assert!((op.log_q1() - split.log_q1).abs() < 1e-10 * scale);
    }

    #[test]
    fn winding_classes_are_exact_and_additive(
        l in 2usize..6,
        m1 in -2i64..3,
        n1 in -2i64..3,
        m2 in -2i64..3,
        n2 in -2i64..3,
        start in (-5i64..6, -5i64..6),
        detour1 in prop::collection::vec(any::<u8>(), 0..12),
        detour2 in prop::collection::vec(any::<u8>(), 0..12),
    ) {
        let a = wound_loop(start, l, m1, n1, &detour1);
        let b = wound_loop(start, l, m2, n2, &detour2);
        let ca = loop_class(&a, l).unwrap();
        let cb = loop_class(&b, l).unwrap();
        prop_assert_eq!(ca, WindingPair { m: m1, n: n1 });
        prop_assert_eq!(cb, WindingPair { m: m2, n: n2 });
        let composed = compose_loops(&a, &b).unwrap();
        prop_assert_eq!(loop_class(&composed, l).unwrap(), ca + cb);
        prop_assert_eq!(loop_class(&a.reversed(), l).unwrap(), -ca);
    }

    #[test]
    fn wolff_flip_count_matches_cluster_size(
        l in 3usize..8,
        k in 0.0f64..1.0,
        seed in any::<u64>(),
    ) {
        let lattice = build_lattice(l, BoundaryCondition::Torus).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut config = SpinConfig::random(l, &mut rng);
        let before = config.spins().to_vec();
        let size = wolff_step(&mut config, &lattice, k, &mut rng).unwrap();
        let flipped = before
            .iter()
            .zip(config.spins())
            .filter(|(a, b)| a != b)
            .count();
        prop_assert_eq!(flipped, size);
        prop_assert!(size >= 1 && size <= l * l);
    }

    #[test]
    fn cumulant_never_exceeds_two_thirds(
        mags in prop::collection::vec(-16i64..=16, 100..300),
        k in 0.0f64..1.0,
    ) {
        let params = ChainParams {
            l: 4,
            bc: BoundaryCondition::Torus,
            k,
            algorithm: Algorithm::Metropolis,
            sweeps: 1,
            burn_in: 0,
            thin: 1,
            seed: 0,
        };
        let n = mags.len();
        let series = ObservableSeries {
            params,
            chain_index: 0,
            energy: vec![0.0; n],
            magnetization: mags,
        };
        let r = estimate(&series).unwrap();
        prop_assert!(r.u4 <= 2.0 / 3.0 + 1e-12, "u4 = {}", r.u4);
        prop_assert!(r.c_v >= 0.0 && r.chi >= 0.0);
    }

    #[test]
    fn bucket_merge_preserves_totals(
        cells in prop::collection::vec((0u64..200, 0.1f64..200.0), 1..30),
    ) {
        let observed: Vec<u64> = cells.iter().map(|c| c.0).collect();
        let expected: Vec<f64> = cells.iter().map(|c| c.1).collect();
        let (mo, me) = merge_small_buckets(&observed, &expected, 10.0);
        prop_assert_eq!(mo.iter().sum::<u64>(), observed.iter().sum::<u64>());
        let before: f64 = expected.iter().sum();
        let after: f64 = me.iter().sum();
        prop_assert!((before - after).abs() < 1e-9 * before.max(1.0));
    }

    #[test]
    fn chi_squared_critical_grows_with_df(df in 1usize..200) {
        let z = 2.3263478740408408;
        prop_assert!(chi_squared_critical(df + 1, z) > chi_squared_critical(df, z));
    }

    #[test]
    fn field_winding_survives_global_rotation(
        l in 4usize..10,
        q in -3i64..4,
        phase in 0.0f64..std::f64::consts::TAU,
        row in 0usize..4,
    ) {
        // Minimal-angle reconstruction needs per-step turns under π.
        prop_assume!(2 * q.unsigned_abs() < l as u64);
        let y = row % l;
        let field = SpinField::from_fn(l, |x, _| {
            let angle = phase + q as f64 * 2.0 * std::f64::consts::PI * x as f64 / l as f64;
            [angle.cos(), angle.sin(), 0.0]
        })
        .unwrap();
        let w = field
            .field_winding(torus_ising::topology::Cycle::XCycle { y })
            .unwrap();
        prop_assert_eq!(w, q);
    }

    #[test]
    fn oriented_fields_report_their_axis(seed in any::<u64>(), l in 3usize..8) {
        let config = config_from_seed(l, seed);
        let field = torus_ising::topology::build_spin_field::<f64>(
            &config,
            Orientation::XParallel,
            &torus_ising::topology::TorusEmbedding::default(),
        )
        .unwrap();
        for x in 0..l {
            for y in 0..l {
                let v = field.get(x, y).unwrap();
                let s = config.get(x, y) as f64;
                prop_assert_eq!(v, [s, 0.0, 0.0]);
            }
        }
    }
}
