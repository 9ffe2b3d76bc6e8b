use std::collections::HashMap;

use rand::Rng;
use shadowqae::seeds::rng_from;
use shadowqae::stabilizer::oracle::{apply_pauli_dense, clifford_unitary, ghz_vector, overlap_abs, statevector};
use shadowqae::stabilizer::{ghz_state, random_clifford, BitString, CliffordOp, PauliString, StabilizerState};
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn random_state(n: usize, seed: u64) -> StabilizerState {
    let mut s = StabilizerState::zero(n).unwrap();
    s.apply_clifford(&random_clifford(n, &mut rng_from(seed)).unwrap()).unwrap();
    s
}

fn dense_probs(s: &StabilizerState) -> Vec<f64> {
    statevector(s).unwrap().iter().map(|c| c.norm_sqr()).collect()
}

#[test]
fn ghz8_statevector_entries() {
    let v = statevector(&ghz_state(8).unwrap()).unwrap();
    let want = ghz_vector(8);
    // Align the global phase on the first entry, then compare entrywise.
    let phase = want[0] / v[0];
    for j in 0..256 {
        assert!((v[j] * phase - want[j]).norm() < 1e-12, "entry {j}");
    }
}

#[test]
fn every_stabilizer_fixes_the_oracle_vector() {
    for seed in 0..30 {
        let n = 1 + (seed as usize % 6);
        let s = random_state(n, seed);
        let v = statevector(&s).unwrap();
        for p in s.stabilizers() {
            let w = apply_pauli_dense(&p, &v);
            assert!((w - &v).norm() < 1e-10);
        }
    }
}

#[test]
fn clifford_action_commutes_with_dense_unitary() {
    let mut rng = rng_from(11);
    for _ in 0..40 {
        let n = rng.random_range(1..=6);
        let c = random_clifford(n, &mut rng).unwrap();
        let u = clifford_unitary(&c).unwrap();
        let mut s = ghz_state(n).unwrap();
        let before = statevector(&s).unwrap();
        s.apply_clifford(&c).unwrap();
        let after = statevector(&s).unwrap();
        assert!((overlap_abs(&after, &(&u * &before)) - 1.0).abs() < 1e-10);
        let probs: Vec<f64> = after.iter().map(|c| c.norm_sqr()).collect();
        for (b, &p) in probs.iter().enumerate() {
            let a = s.amplitude_sq(&BitString::from_u64(n, b as u64).unwrap()).unwrap();
            assert!((a.to_f64() - p).abs() < 1e-12);
        }
    }
}

#[test]
fn inverse_restores_the_stabilizer_group() {
    let mut rng = rng_from(12);
    for _ in 0..50 {
        let n = rng.random_range(1..=10);
        let c = random_clifford(n, &mut rng).unwrap();
        let mut s = ghz_state(n).unwrap();
        s.apply_clifford(&c).unwrap();
        s.apply_clifford(&c.inverse()).unwrap();
        for p in ghz_state(n).unwrap().stabilizers() {
            assert!(s.is_stabilized_by(&p));
        }
    }
}

#[test]
fn amplitudes_sum_to_one() {
    for seed in 0..20 {
        let n = 1 + (seed as usize % 6);
        let s = random_state(n, 100 + seed);
        let total: f64 = (0..1u64 << n)
            .map(|b| s.amplitude_sq(&BitString::from_u64(n, b).unwrap()).unwrap().to_f64())
            .sum();
        assert_eq!(total, 1.0);
    }
}

#[test]
fn measurement_frequencies_match_oracle() {
    let mut rng = rng_from(13);
    let c = random_clifford(5, &mut rng).unwrap();
    let mut base = ghz_state(5).unwrap();
    base.apply_clifford(&c).unwrap();
    let probs = dense_probs(&base);
    let shots = 100_000;
    let mut counts = vec![0usize; 32];
    for _ in 0..shots {
        let b = base.clone().measure_all(&mut rng);
        counts[b.to_u64().unwrap() as usize] += 1;
    }
    let tv: f64 = counts
        .iter()
        .zip(&probs)
        .map(|(&k, &p)| (k as f64 / shots as f64 - p).abs())
        .sum::<f64>()
        / 2.0;
    assert!(tv < 0.01, "total variation {tv}");
}

#[test]
fn state_stays_valid_under_mixed_operations() {
    let mut rng = rng_from(14);
    for _ in 0..30 {
        let n = rng.random_range(1..=12);
        let mut s = ghz_state(n).unwrap();
        for _ in 0..4 {
            s.apply_clifford(&random_clifford(n, &mut rng).unwrap()).unwrap();
            s.apply_pauli(&shadowqae::stabilizer::random_nonidentity_pauli(n, &mut rng)).unwrap();
            let q = rng.random_range(0..n);
            s.measure(q, &mut rng);
            assert!(s.is_valid());
            assert_eq!(s.tableau_rank(), 2 * n);
        }
        s.measure_all(&mut rng);
        assert!(s.is_valid());
    }
}

#[test]
fn global_paulis_on_ghz() {
    let mut g2 = ghz_state(2).unwrap();
    let before = g2.stabilizers();
    g2.apply_pauli(&PauliString::all_z(2)).unwrap();
    assert_eq!(g2.stabilizers(), before);

    let mut g3 = ghz_state(3).unwrap();
    g3.apply_pauli(&PauliString::all_z(3)).unwrap();
    assert_eq!(g3.amplitude_sq(&BitString::zeros(3)).unwrap().to_f64(), 0.5);
    let flipped = statevector(&g3).unwrap();
    assert!(overlap_abs(&flipped, &ghz_vector(3)) < 1e-12);

    for n in 1..8 {
        let mut g = ghz_state(n).unwrap();
        let before = g.stabilizers();
        g.apply_pauli(&PauliString::all_x(n)).unwrap();
        assert_eq!(g.stabilizers(), before);
    }
}

#[test]
fn single_qubit_cliffords_are_uniform() {
    let mut rng = rng_from(15);
    let draws = 100_000;
    let mut counts: HashMap<String, usize> = HashMap::new();
    for _ in 0..draws {
        let c = random_clifford(1, &mut rng).unwrap();
        *counts.entry(format!("{} {}", c.image_x(0), c.image_z(0))).or_default() += 1;
    }
    assert_eq!(counts.len(), 24);
    let expect = draws as f64 / 24.0;
    let stat: f64 = counts.values().map(|&k| (k as f64 - expect).powi(2) / expect).sum();
    let p = ChiSquared::new(23.0).unwrap().sf(stat);
    assert!(p > 0.001, "chi-square {stat}, p = {p}");
}

#[test]
fn two_qubit_cliffords_cover_the_group_evenly() {
    // |C_2 / phases| = 11520.
    let mut rng = rng_from(16);
    let draws = 460_800;
    let mut counts: HashMap<String, usize> = HashMap::new();
    for _ in 0..draws {
        let c = random_clifford(2, &mut rng).unwrap();
        let key = format!("{} {} {} {}", c.image_x(0), c.image_x(1), c.image_z(0), c.image_z(1));
        *counts.entry(key).or_default() += 1;
    }
    assert_eq!(counts.len(), 11_520);
    let expect = draws as f64 / 11_520.0;
    let stat: f64 = counts.values().map(|&k| (k as f64 - expect).powi(2) / expect).sum();
    let p = ChiSquared::new(11_519.0).unwrap().sf(stat);
    assert!(p > 0.001, "chi-square {stat}, p = {p}");
}

#[test]
fn cliffords_form_a_one_design() {
    let mut rng = rng_from(17);
    for n in [1usize, 3, 5] {
        let samples = 100_000;
        let b = BitString::from_u64(n, 1).unwrap();
        let vals: Vec<f64> = (0..samples)
            .map(|_| {
                let mut s = StabilizerState::zero(n).unwrap();
                s.apply_clifford(&random_clifford(n, &mut rng).unwrap()).unwrap();
                s.amplitude_sq(&b).unwrap().to_f64()
            })
            .collect();
        let mean = vals.iter().sum::<f64>() / samples as f64;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (samples - 1) as f64;
        let se = (var / samples as f64).sqrt();
        let target = 1.0 / (1u64 << n) as f64;
        assert!((mean - target).abs() <= 5.0 * se, "n={n}: {mean} vs {target}");
    }
}

#[test]
fn overlap_moments_for_pure_stabilizer_states() {
    let mut rng = rng_from(18);
    for n in 2..=6 {
        let d = (1u64 << n) as f64;
        let ghz = ghz_state(n).unwrap();
        let phi = random_state(n, 200 + n as u64);
        let f = overlap_abs(&statevector(&phi).unwrap(), &ghz_vector(n)).powi(2);
        let samples = 100_000;
        let vals: Vec<f64> = (0..samples)
            .map(|_| {
                let c = random_clifford(n, &mut rng).unwrap();
                let mut bob = phi.clone();
                bob.apply_clifford(&c).unwrap();
                let b = bob.measure_all(&mut rng);
                let mut alice = ghz.clone();
                alice.apply_clifford(&c).unwrap();
                alice.amplitude_sq(&b).unwrap().to_f64()
            })
            .collect();
        let mean = vals.iter().sum::<f64>() / samples as f64;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (samples - 1) as f64;
        let se = (var / samples as f64).sqrt();
        let target = (1.0 + f) / (d + 1.0);
        assert!((mean - target).abs() <= 5.0 * se, "n={n}: mean {mean}, target {target}");
        assert!(var <= 3.0 / (d + 1.0).powi(2), "n={n}: variance {var}");
    }
}

#[test]
fn serialized_cliffords_round_trip() {
    let c = random_clifford(7, &mut rng_from(19)).unwrap();
    let text = serde_json::to_string(&c).unwrap();
    let back: CliffordOp = serde_json::from_str(&text).unwrap();
    assert_eq!(back, c);
}
