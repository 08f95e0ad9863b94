use ioncat::motional::{coherent_state, FockSpace, MotionalDensity, MotionalState};
use ioncat::wigner::{wigner, Axis, WignerGrid, CONVENTION};
use ioncat::C64;

/// `⟨x|ψ⟩ = Σ c_n ψ_n(x)` with the normalized oscillator eigenfunctions for
/// `x = (a + a†)/√2`, built by the stable three-term recursion.
fn position_density(amps: &[C64], x: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = std::f64::consts::PI.powf(-0.25) * (-x * x / 2.0).exp();
    let mut psi = C64::from(0.0);
    for (n, c) in amps.iter().enumerate() {
        psi += c * cur;
        let next = (2.0 / (n as f64 + 1.0)).sqrt() * x * cur - (n as f64 / (n as f64 + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    psi.norm_sqr()
}

fn check_marginal(state: &MotionalState, x_range: f64, p_range: f64) {
    let xs = Axis::new(-x_range, x_range, 41).unwrap();
    let ps = Axis::new(-p_range, p_range, 401).unwrap();
    let grid = wigner(state, xs.clone(), ps).unwrap();
    for (i, m) in grid.x_marginal().iter().enumerate() {
        let expected = position_density(state.amplitudes(), xs.value(i));
        assert!((m - expected).abs() < 1e-3, "x = {}: {m} vs {expected}", xs.value(i));
    }
}

#[test]
fn marginal_matches_hermite_expansion() {
    let space = FockSpace::new(60).unwrap();
    for n in [0usize, 1, 3] {
        check_marginal(&MotionalState::fock(space, n).unwrap(), 4.0, 8.0);
    }
    let coh = coherent_state(C64::new(1.2, -0.7), space).unwrap();
    check_marginal(&coh, 6.0, 8.0);
    // cat along x shows two peaks in the marginal; along p it shows fringes
    for beta in [C64::new(2.0, 0.0), C64::new(0.0, 2.0)] {
        let a = coherent_state(beta, space).unwrap();
        let b = coherent_state(-beta, space).unwrap();
        let cat = MotionalState::superpose(&[(C64::from(1.0), &a), (C64::from(-1.0), &b)]).unwrap();
        check_marginal(&cat, 6.0, 9.0);
    }
}

#[test]
fn values_bounded_by_one_over_pi() {
    let space = FockSpace::new(60).unwrap();
    let a = coherent_state(C64::new(0.0, 2.5), space).unwrap();
    let b = coherent_state(C64::new(0.0, -2.5), space).unwrap();
    let states = [
        MotionalState::superpose(&[(C64::from(1.0), &a), (C64::new(0.0, 1.0), &b)]).unwrap(),
        MotionalState::fock(space, 7).unwrap(),
    ];
    for s in &states {
        let axis = Axis::new(-6.0, 6.0, 61).unwrap();
        let grid = wigner(s, axis.clone(), axis).unwrap();
        let bound = 1.0 / std::f64::consts::PI + 1e-6;
        assert!(grid.max() <= bound && grid.min() >= -bound);
    }
}

#[test]
fn csv_rows_follow_documented_schema() {
    let space = FockSpace::new(20).unwrap();
    let s = coherent_state(C64::new(0.5, -0.2), space).unwrap();
    let grid = wigner(&s, Axis::new(-1.0, 1.0, 3).unwrap(), Axis::new(-2.0, 2.0, 5).unwrap()).unwrap();
    let csv = grid.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,p,w"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 15);
    // x outer, p inner
    assert_eq!(rows[0][..2], [-1.0, -2.0]);
    assert_eq!(rows[1][..2], [-1.0, -1.0]);
    assert_eq!(rows[5][..2], [0.0, -2.0]);
    for (idx, row) in rows.iter().enumerate() {
        let w = grid.at(idx / 5, idx % 5);
        assert!((row[2] - w).abs() <= 1e-13 * w.abs().max(1e-300));
    }
}

#[test]
fn json_grid_round_trips() {
    let space = FockSpace::new(12).unwrap();
    let mix = MotionalDensity::mixture(&[
        (0.5, &MotionalState::vacuum(space)),
        (0.5, &MotionalState::fock(space, 1).unwrap()),
    ])
    .unwrap();
    let grid = wigner(&mix, Axis::new(-2.0, 2.0, 9).unwrap(), Axis::new(-2.0, 2.0, 9).unwrap()).unwrap();
    let back: WignerGrid = serde_json::from_str(&grid.to_json()).unwrap();
    assert_eq!(back.convention, CONVENTION);
    assert_eq!(back.values, grid.values);
    // equal mixture of |0⟩ and |1⟩: W(0,0) = (1/π)(1 - 1)/2 = 0
    assert!(grid.at(4, 4).abs() < 1e-12);
}
