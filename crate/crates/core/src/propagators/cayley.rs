use num_complex::Complex64;

use crate::error::Result;
use crate::linalg::ComplexMatrix;
use crate::spectral::SpectralData;

/// Cayley transform `(I + iγp/2)(I − iγp/2)⁻¹`, the (1,1) Padé approximant of
/// `exp(iγp)`. Unitary when `p` is Hermitian.
pub fn cayley(gamma: f64, p: &ComplexMatrix) -> Result<ComplexMatrix> {
    let half = Complex64::new(0.0, 0.5 * gamma);
    let plus = p.scale(half).shifted(Complex64::new(1.0, 0.0));
    let minus = p.scale(-half).shifted(Complex64::new(1.0, 0.0));
    // The two factors commute, so the right inverse equals the left solve.
    minus.solve(&plus)
}

/// Crank–Nicolson step of the Liouville equation `∂ρ = −i[γp/Δt, ρ]`:
///
/// ```text
/// ρ⁺ + (iγ/2)[p, ρ⁺] = ρ − (iγ/2)[p, ρ]
/// ```
///
/// In the eigenbasis of `p` the commutator is diagonal, so the linear system
/// decouples entrywise into `ρ̃⁺_jk = ρ̃_jk (1 − iθ_jk/2)/(1 + iθ_jk/2)` with
/// `θ_jk = γ(λ_j − λ_k)`. Each factor is unimodular, which keeps trace and
/// Hermiticity. The factor matrix is not rank one for three or more
/// levels, so this is not a similarity transform and positivity can be lost.
pub fn crank_nicolson_liouville(
    gamma: f64,
    spec: &SpectralData,
    rho: &ComplexMatrix,
) -> ComplexMatrix {
    let u = spec.eigenvectors();
    let lambda = spec.eigenvalues();
    let n = u.dim();
    let rotated = u.adjoint_matmul(&rho.matmul(u));
    let factors = ComplexMatrix::from_fn(n, |j, k| {
        let theta = gamma * (lambda[j] - lambda[k]);
        Complex64::new(1.0, -0.5 * theta) / Complex64::new(1.0, 0.5 * theta)
    });
    let stepped = rotated.hadamard(&factors);
    u.matmul(&stepped).matmul(&u.adjoint())
}
