use super::kernel::SmoothingSpec;
use crate::chain_models::{
    dobrushin_tv, ergodicity_power, stationary_distribution, KernelFamily, STATIONARY_TOL,
};
use crate::error::{Error, Result};

pub const DEFAULT_TAIL_TOL: f64 = 1e-14;
const MAX_LAGS: usize = 10_000_000;

/// `Σ^{(1)}_u = k2 [Γ_u(0) + Σ_{j≥1} (Γ_u(j) + Γ_u(j)')]` with
/// `Γ_u(j)_{xy} = π_u(x) Q_u^j(x,y) − π_u(x) π_u(y)`.
///
/// The series stops once `S · c(Q_u^m)^{⌊j/m⌋} < tail_tol`, which bounds every
/// later entry of `Γ_u(j)`.
pub fn sigma1<F: KernelFamily + ?Sized>(
    family: &F,
    u: f64,
    spec: &SmoothingSpec,
    tail_tol: f64,
) -> Result<Vec<Vec<f64>>> {
    let q = family.transition_matrix(u)?;
    let s = q.size();
    let m = ergodicity_power(&q)?;
    let r = dobrushin_tv(&q.pow(m));
    let pi = stationary_distribution(&q, STATIONARY_TOL)?
        .weights()
        .to_vec();
    let mut sig: Vec<Vec<f64>> = (0..s)
        .map(|x| {
            (0..s)
                .map(|y| if x == y { pi[x] } else { 0.0 } - pi[x] * pi[y])
                .collect()
        })
        .collect();
    let mut qj = q.clone();
    let mut j = 1;
    loop {
        let blocks = (j / m) as i32;
        if (s as f64) * r.powi(blocks) < tail_tol {
            break;
        }
        if j > MAX_LAGS {
            return Err(Error::Diagnostic(format!(
                "covariance series did not reach {tail_tol} after {MAX_LAGS} lags"
            )));
        }
        for x in 0..s {
            for y in 0..s {
                let g = pi[x] * qj.get(x, y) - pi[x] * pi[y];
                sig[x][y] += g;
                sig[y][x] += g;
            }
        }
        qj = qj.mul(&q);
        j += 1;
    }
    let k2 = spec.k2();
    for row in &mut sig {
        for v in row.iter_mut() {
            *v *= k2;
        }
    }
    Ok(sig)
}

/// `Σ^{(2)}_u` indexed by pairs `(x,y) ↦ xS + y`:
/// `k2 · 1{x=x'} Q_u(x,y)[1{y=y'} − Q_u(x',y')] / π_u(x)`.
pub fn sigma2<F: KernelFamily + ?Sized>(
    family: &F,
    u: f64,
    spec: &SmoothingSpec,
) -> Result<Vec<Vec<f64>>> {
    let q = family.transition_matrix(u)?;
    let s = q.size();
    let pi = stationary_distribution(&q, STATIONARY_TOL)?;
    let k2 = spec.k2();
    let mut out = vec![vec![0.0; s * s]; s * s];
    for x in 0..s {
        let px = pi.weights()[x];
        if px <= 0.0 {
            return Err(Error::Undefined(format!(
                "invariant mass of state {x} is zero at u={u}"
            )));
        }
        for y in 0..s {
            for y2 in 0..s {
                let ind = if y == y2 { 1.0 } else { 0.0 };
                out[x * s + y][x * s + y2] = k2 * q.get(x, y) * (ind - q.get(x, y2)) / px;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain_models::{FiniteKernelFamily, StochasticMatrix};
    use crate::estimate::kernel::KernelKind;

    fn epa() -> SmoothingSpec {
        SmoothingSpec::new(KernelKind::Epanechnikov, 0.1, 1).unwrap()
    }

    fn fam(rows: &[Vec<f64>]) -> FiniteKernelFamily {
        FiniteKernelFamily::constant(&StochasticMatrix::from_rows(rows).unwrap(), "c").unwrap()
    }

    #[test]
    fn symmetric_two_state() {
        let f = fam(&[vec![0.75, 0.25], vec![0.25, 0.75]]);
        let s = sigma1(&f, 0.3, &epa(), DEFAULT_TAIL_TOL).unwrap();
        assert!((s[0][0] - 0.45).abs() < 1e-12);
        assert!((s[0][1] + 0.45).abs() < 1e-12);
    }

    #[test]
    fn iid_family_has_no_serial_terms() {
        let f = fam(&[
            vec![0.2, 0.3, 0.5],
            vec![0.2, 0.3, 0.5],
            vec![0.2, 0.3, 0.5],
        ]);
        let s = sigma1(&f, 0.0, &epa(), DEFAULT_TAIL_TOL).unwrap();
        let pi = [0.2, 0.3, 0.5];
        for x in 0..3 {
            for y in 0..3 {
                let want = 0.6 * (if x == y { pi[x] } else { 0.0 } - pi[x] * pi[y]);
                assert!((s[x][y] - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn sigma2_entry_and_structure() {
        let f = fam(&[vec![0.7, 0.3], vec![0.4, 0.6]]);
        let s = sigma2(&f, 0.5, &epa()).unwrap();
        assert!((s[1][1] - 0.2205).abs() < 1e-12);
        for a in 0..4 {
            for b in 0..4 {
                if a / 2 != b / 2 {
                    assert_eq!(s[a][b], 0.0);
                }
            }
            let block = a / 2;
            let row: f64 = (0..2).map(|y2| s[a][block * 2 + y2]).sum();
            assert!(row.abs() < 1e-15);
        }
    }

    #[test]
    fn zero_mass_state_is_undefined() {
        // State 2 is transient at u: π(2) = 0.
        let f = fam(&[
            vec![0.5, 0.5, 0.0],
            vec![0.5, 0.5, 0.0],
            vec![0.5, 0.5, 0.0],
        ]);
        assert!(matches!(sigma2(&f, 0.0, &epa()), Err(Error::Undefined(_))));
    }
}
