//! Fixed quadrature rules: Gauss-Legendre on the unit interval, a degree-4
//! rule on the reference triangle and a degree-5 rule on the reference
//! tetrahedron.
//!
//! Weights are normalized to sum to one, so integrals are obtained by
//! multiplying the weighted sum by the measure of the physical element.

/// A quadrature point on the reference tetrahedron in barycentric coordinates.
#[derive(Debug, Clone, Copy)]
pub struct TetPoint {
    pub bary: [f64; 4],
    pub weight: f64,
}

/// 14-point rule on the tetrahedron, exact for polynomials of degree 5
/// (in particular every degree-4 integrand used by the assembly routines).
pub fn tet_rule_14() -> Vec<TetPoint> {
    const A1: f64 = 0.310_885_919_263_300_6;
    const W1: f64 = 0.112_687_925_718_016_2;
    const A2: f64 = 0.092_735_250_310_891_23;
    const W2: f64 = 0.073_493_043_116_361_95;
    const A3: f64 = 0.045_503_704_125_649_65;
    const W3: f64 = 0.042_546_020_777_081_47;

    let mut pts = Vec::with_capacity(14);
    for orbit in [(A1, W1), (A2, W2)] {
        let (a, w) = orbit;
        let b = 1.0 - 3.0 * a;
        for k in 0..4 {
            let mut bary = [a; 4];
            bary[k] = b;
            pts.push(TetPoint { bary, weight: w });
        }
    }
    let c = A3;
    let d = 0.5 - A3;
    for (i, j) in [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)] {
        let mut bary = [d; 4];
        bary[i] = c;
        bary[j] = c;
        pts.push(TetPoint { bary, weight: W3 });
    }
    pts
}

/// A quadrature point on the reference triangle in barycentric coordinates.
#[derive(Debug, Clone, Copy)]
pub struct TriPoint {
    pub bary: [f64; 3],
    pub weight: f64,
}

/// 6-point rule on the triangle, exact for polynomials of degree 4.
pub fn tri_rule_6() -> Vec<TriPoint> {
    const A1: f64 = 0.445_948_490_915_965;
    const W1: f64 = 0.223_381_589_678_011;
    const A2: f64 = 0.091_576_213_509_771;
    const W2: f64 = 0.109_951_743_655_322;

    let mut pts = Vec::with_capacity(6);
    for (a, w) in [(A1, W1), (A2, W2)] {
        let b = 1.0 - 2.0 * a;
        for k in 0..3 {
            let mut bary = [a; 3];
            bary[k] = b;
            pts.push(TriPoint { bary, weight: w });
        }
    }
    pts
}

/// Gauss-Legendre points and weights on `[0, 1]`, weights summing to one
/// (degree of exactness `2n - 1`). Rules up to six points are tabulated;
/// higher orders are computed by Newton iteration on the Legendre
/// polynomial, accurate to machine precision.
pub fn gauss_01(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1, "gauss_01 needs at least one point");
    // Nodes/weights on [-1, 1]; only the non-negative half is listed.
    let half: &[(f64, f64)] = match n {
        1 => &[(0.0, 2.0)],
        2 => &[(0.577_350_269_189_625_7, 1.0)],
        3 => &[
            (0.0, 0.888_888_888_888_888_9),
            (0.774_596_669_241_483_4, 0.555_555_555_555_555_6),
        ],
        4 => &[
            (0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
            (0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
        ],
        5 => &[
            (0.0, 0.568_888_888_888_888_9),
            (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
            (0.906_179_845_938_664, 0.236_926_885_056_189_1),
        ],
        6 => &[
            (0.238_619_186_083_196_9, 0.467_913_934_572_691),
            (0.661_209_386_466_264_5, 0.360_761_573_048_138_6),
            (0.932_469_514_203_152_1, 0.171_324_492_379_170_4),
        ],
        _ => &[],
    };
    let mut pts = Vec::with_capacity(n);
    if half.is_empty() {
        for k in 0..n.div_ceil(2) {
            let (x, w) = legendre_root(n, k);
            // root spacing is O(1/n), so anything this small is the
            // midpoint root of an odd rule
            if x.abs() < 1e-12 {
                pts.push((0.5, w / 2.0));
            } else {
                pts.push(((1.0 - x) / 2.0, w / 2.0));
                pts.push(((1.0 + x) / 2.0, w / 2.0));
            }
        }
    } else {
        for &(x, w) in half {
            if x == 0.0 {
                pts.push((0.5, w / 2.0));
            } else {
                pts.push(((1.0 - x) / 2.0, w / 2.0));
                pts.push(((1.0 + x) / 2.0, w / 2.0));
            }
        }
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts
}

/// The `k`-th root of the Legendre polynomial `P_n` counted from the
/// right end of `[-1, 1]`, with the matching Gauss weight.
fn legendre_root(n: usize, k: usize) -> (f64, f64) {
    let nf = n as f64;
    let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (nf + 0.5)).cos();
    for _ in 0..100 {
        let (p, dp) = legendre_eval(n, x);
        let dx = p / dp;
        x -= dx;
        if dx.abs() < 1e-15 {
            break;
        }
    }
    let (_, dp) = legendre_eval(n, x);
    (x, 2.0 / ((1.0 - x * x) * dp * dp))
}

/// Value and derivative of the Legendre polynomial `P_n` at `x` via the
/// three-term recurrence.
fn legendre_eval(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut p0 = 1.0;
    let mut p1 = x;
    for m in 2..=n {
        let mf = m as f64;
        let p2 = ((2.0 * mf - 1.0) * x * p1 - (mf - 1.0) * p0) / mf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(k: u32) -> f64 {
        (1..=k).map(|i| i as f64).product()
    }

    /// Exact integral of x^a y^b z^c over the reference tetrahedron.
    fn tet_monomial(a: u32, b: u32, c: u32) -> f64 {
        factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 3)
    }

    /// Exact integral of x^a y^b over the reference triangle.
    fn tri_monomial(a: u32, b: u32) -> f64 {
        factorial(a) * factorial(b) / factorial(a + b + 2)
    }

    #[test]
    fn tet_rule_weights_sum_to_one() {
        let s: f64 = tet_rule_14().iter().map(|p| p.weight).sum();
        assert!((s - 1.0).abs() < 1e-14);
    }

    #[test]
    fn tet_rule_exact_through_degree_five() {
        let rule = tet_rule_14();
        // reference volume 1/6: quadrature sum * (1/6) must match the
        // exact monomial integral
        for a in 0..=5u32 {
            for b in 0..=(5 - a) {
                for c in 0..=(5 - a - b) {
                    let approx: f64 = rule
                        .iter()
                        .map(|p| {
                            let x = p.bary[1];
                            let y = p.bary[2];
                            let z = p.bary[3];
                            p.weight * x.powi(a as i32) * y.powi(b as i32) * z.powi(c as i32)
                        })
                        .sum::<f64>()
                        / 6.0;
                    let exact = tet_monomial(a, b, c);
                    assert!(
                        (approx - exact).abs() < 1e-15 + 1e-13 * exact.abs(),
                        "x^{a} y^{b} z^{c}: {approx} vs {exact}"
                    );
                }
            }
        }
    }

    #[test]
    fn tri_rule_exact_through_degree_four() {
        let rule = tri_rule_6();
        for a in 0..=4u32 {
            for b in 0..=(4 - a) {
                let approx: f64 = rule
                    .iter()
                    .map(|p| {
                        let x = p.bary[1];
                        let y = p.bary[2];
                        p.weight * x.powi(a as i32) * y.powi(b as i32)
                    })
                    .sum::<f64>()
                    / 2.0;
                let exact = tri_monomial(a, b);
                assert!(
                    (approx - exact).abs() < 1e-15 + 1e-13 * exact.abs(),
                    "x^{a} y^{b}: {approx} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn gauss_rules_integrate_monomials() {
        for n in [1usize, 2, 3, 4, 5, 6, 7, 9, 12, 16, 24, 33, 64] {
            let rule = gauss_01(n);
            assert_eq!(rule.len(), n);
            let wsum: f64 = rule.iter().map(|p| p.1).sum();
            assert!((wsum - 1.0).abs() < 1e-13, "n={n} weight sum {wsum}");
            let tol = if n <= 6 { 1e-14 } else { 1e-12 };
            for k in 0..=(2 * n - 1) as u32 {
                let approx: f64 = rule.iter().map(|&(x, w)| w * x.powi(k as i32)).sum();
                let exact = 1.0 / (k as f64 + 1.0);
                assert!(
                    (approx - exact).abs() < tol,
                    "n={n} x^{k}: {approx} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn legendre_roots_match_tabulated_rules() {
        for n in 2..=6usize {
            let table = gauss_01(n);
            for k in 0..n.div_ceil(2) {
                let (x, w) = legendre_root(n, k);
                let x01 = (1.0 + x) / 2.0;
                let hit = table
                    .iter()
                    .find(|p| (p.0 - x01).abs() < 1e-14)
                    .unwrap_or_else(|| panic!("n={n} k={k}: node {x01} not tabulated"));
                assert!((hit.1 - w / 2.0).abs() < 1e-14, "n={n} k={k} weight");
            }
        }
    }
}
