//! Linear chain trick: every fractional integral becomes a block of linear
//! ODEs driven by its integrand, giving a stiff system `𝓜 Y' = 𝓕(t, Y)`.
//!
//! For an order `α ∈ (0,1)` each exponential `c_i e^(-γ_i t)` of the kernel
//! approximation contributes `z_i' = -γ_i z_i + G` and `I = Σ c_i z_i`. For
//! `α > 1` the kernel is split as
//! `t^(α-1)/Γ(α) = p · t^(m-1) · t^(α0-1)/Γ(α0)` with `m = ceil(α)`,
//! `α0 = α - m + 1`, and each exponential carries a chain
//! `z_(i,1)' = -γ_i z_(i,1) + G`, `z_(i,k)' = -γ_i z_(i,k) + (k-1) z_(i,k-1)`,
//! with `I = p Σ c_i z_(i,m)`.
//!
//! State layout: `y` first, then the blocks in term order, each block ordered
//! by exponential and then by chain position.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{Coupling, HeadMatrix, SparseRow};
use crate::problem::FractionalIvp;
use crate::radau::ImplicitSystem;
use crate::soe::{choose_parameters_split, SumOfExponentials};

/// Splits an integral order into `(prefactor, α0, m)`.
pub fn kernel_split(alpha: f64) -> Result<(f64, f64, usize)> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!("integral order must be positive, got {alpha}")));
    }
    if alpha < 1.0 {
        return Ok((1.0, alpha, 1));
    }
    if alpha.fract() == 0.0 {
        return Err(Error::IntegerOrder(alpha));
    }
    let m = alpha.ceil() as usize;
    let prefactor = (1..m).fold(1.0, |acc, k| acc / (alpha - k as f64));
    Ok((prefactor, alpha - (m - 1) as f64, m))
}

/// Auxiliary states of one integral term.
#[derive(Debug, Clone)]
pub struct BlockSpec {
    order: f64,
    chain_len: usize,
    prefactor: f64,
    kernel: Arc<SumOfExponentials>,
    offset: usize,
}

impl BlockSpec {
    /// Block for an integral of order `order` whose states start at `offset`.
    /// `kernel` must approximate the kernel of the split order `α0`.
    pub fn new(order: f64, kernel: Arc<SumOfExponentials>, offset: usize) -> Result<Self> {
        let (prefactor, alpha0, chain_len) = kernel_split(order)?;
        if (kernel.alpha() - alpha0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "kernel of order {} does not match the split order {alpha0} of {order}",
                kernel.alpha()
            )));
        }
        Ok(BlockSpec { order, chain_len, prefactor, kernel, offset })
    }

    /// Order `α_j` of the integral term.
    pub fn order(&self) -> f64 {
        self.order
    }
    /// Chain length `m_j = ceil(α_j)`.
    pub fn chain_len(&self) -> usize {
        self.chain_len
    }
    pub fn prefactor(&self) -> f64 {
        self.prefactor
    }
    pub fn kernel(&self) -> &SumOfExponentials {
        &self.kernel
    }
    pub fn weights(&self) -> &[f64] {
        self.kernel.weights()
    }
    pub fn exponents(&self) -> &[f64] {
        self.kernel.exponents()
    }
    pub fn n_exponentials(&self) -> usize {
        self.kernel.len()
    }
    /// First state index of the block.
    pub fn offset(&self) -> usize {
        self.offset
    }
    pub fn len(&self) -> usize {
        self.chain_len * self.kernel.len()
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Diagonal of the block Jacobian `J_j`.
    pub fn diagonal(&self) -> Vec<f64> {
        self.exponents().iter().flat_map(|&g| std::iter::repeat_n(-g, self.chain_len)).collect()
    }

    /// Subdiagonal of `J_j`: `1, 2, …, m-1, 0` repeated, without the final 0.
    pub fn subdiagonal(&self) -> Vec<f64> {
        let m = self.chain_len;
        (1..self.len()).map(|r| (r % m) as f64).collect()
    }

    /// `I_j` read off the block states.
    pub fn integral(&self, state: &[f64]) -> f64 {
        let m = self.chain_len;
        let z = &state[self.offset..self.offset + self.len()];
        let s: f64 = self.weights().iter().zip(z.chunks_exact(m)).map(|(c, zi)| c * zi[m - 1]).sum();
        self.prefactor * s
    }
}

/// Arrow-shaped Jacobian of the augmented system.
#[derive(Debug, Clone)]
pub struct StructuredJacobian {
    /// `∂F/∂y`.
    pub head: HeadMatrix,
    /// `∂F/∂I`; column `j` couples block `j` into the head rows.
    pub coupling: Coupling,
    /// `∂G_j/∂y`; row `j` drives the first chain state of block `j`.
    pub gradients: Vec<SparseRow>,
    pub blocks: Arc<[BlockSpec]>,
}

impl StructuredJacobian {
    pub fn head_dim(&self) -> usize {
        self.head.dim()
    }

    pub fn total_dim(&self) -> usize {
        self.head_dim() + self.blocks.iter().map(BlockSpec::len).sum::<usize>()
    }
}

/// The stiff ODE/DAE produced by the chain trick.
#[derive(Debug, Clone)]
pub struct AugmentedSystem {
    base: FractionalIvp,
    kernels: Vec<Arc<SumOfExponentials>>,
    blocks: Arc<[BlockSpec]>,
    mass: Vec<f64>,
    y0: Vec<f64>,
}

/// Builds the augmented system with kernel accuracy `eps` on `[0, t_end]`.
pub fn augment(p: &FractionalIvp, eps: f64, t_end: f64) -> Result<AugmentedSystem> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Accuracy(eps));
    }
    let d = p.dim();
    let mut kernels: Vec<Arc<SumOfExponentials>> = Vec::new();
    let mut blocks = Vec::with_capacity(p.n_integrals());
    let mut offset = d;
    for &alpha in p.orders() {
        let (prefactor, alpha0, m) = kernel_split(alpha)?;
        let kernel = match kernels.iter().find(|k| k.params().delta_order() == alpha) {
            Some(k) => k.clone(),
            None => {
                let k = Arc::new(SumOfExponentials::build(choose_parameters_split(alpha0, alpha, eps, t_end)?));
                kernels.push(k.clone());
                k
            }
        };
        let block = BlockSpec { order: alpha, chain_len: m, prefactor, kernel, offset };
        offset += block.len();
        blocks.push(block);
    }
    let mut mass = p.mass().to_vec();
    mass.resize(offset, 1.0);
    let mut y0 = p.y0().to_vec();
    y0.resize(offset, 0.0);
    Ok(AugmentedSystem { base: p.clone(), kernels, blocks: blocks.into(), mass, y0 })
}

impl AugmentedSystem {
    pub fn base(&self) -> &FractionalIvp {
        &self.base
    }
    /// One kernel per distinct order.
    pub fn kernels(&self) -> &[Arc<SumOfExponentials>] {
        &self.kernels
    }
    pub fn blocks(&self) -> &Arc<[BlockSpec]> {
        &self.blocks
    }
    pub fn head_dim(&self) -> usize {
        self.base.dim()
    }
    pub fn total_dim(&self) -> usize {
        self.y0.len()
    }
    pub fn mass(&self) -> &[f64] {
        &self.mass
    }
    pub fn y0(&self) -> &[f64] {
        &self.y0
    }

    /// `I_j` for every term.
    pub fn integrals(&self, state: &[f64]) -> Vec<f64> {
        self.blocks.iter().map(|b| b.integral(state)).collect()
    }

    pub fn rhs(&self, t: f64, state: &[f64], out: &mut [f64]) {
        let d = self.head_dim();
        assert_eq!(state.len(), self.total_dim(), "state length");
        let integrals = self.integrals(state);
        let y = &state[..d];
        self.base.model().rhs(t, y, &integrals, &mut out[..d]);
        let mut g = vec![0.0; self.blocks.len()];
        self.base.model().integrands(t, y, &mut g);
        for (b, gj) in self.blocks.iter().zip(g) {
            let m = b.chain_len;
            let range = b.offset..b.offset + b.len();
            let z = state[range.clone()].chunks_exact(m);
            let dz = out[range].chunks_exact_mut(m);
            for ((zi, dzi), &gamma) in z.zip(dz).zip(b.exponents()) {
                dzi[0] = -gamma * zi[0] + gj;
                for k in 1..m {
                    dzi[k] = -gamma * zi[k] + k as f64 * zi[k - 1];
                }
            }
        }
    }

    pub fn jacobian(&self, t: f64, state: &[f64]) -> StructuredJacobian {
        let d = self.head_dim();
        let integrals = self.integrals(state);
        let y = &state[..d];
        let model = self.base.model();
        let mut head = self.base.new_head();
        model.jac_y(t, y, &integrals, &mut head);
        let mut coupling = self.base.new_coupling();
        model.jac_integrals(t, y, &integrals, &mut coupling);
        let mut gradients = self.base.new_gradient_rows();
        model.jac_integrands(t, y, &mut gradients);
        StructuredJacobian { head, coupling, gradients, blocks: self.blocks.clone() }
    }
}

impl ImplicitSystem for AugmentedSystem {
    type Jacobian = StructuredJacobian;

    fn dim(&self) -> usize {
        self.total_dim()
    }
    fn output_dim(&self) -> usize {
        self.head_dim()
    }
    fn mass(&self) -> &[f64] {
        &self.mass
    }
    fn initial_state(&self) -> Vec<f64> {
        self.y0.clone()
    }
    fn rhs(&self, t: f64, y: &[f64], out: &mut [f64]) {
        AugmentedSystem::rhs(self, t, y, out)
    }
    fn jacobian(&self, t: f64, y: &[f64]) -> StructuredJacobian {
        AugmentedSystem::jacobian(self, t, y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_prefactors() {
        assert_eq!(kernel_split(0.4).unwrap(), (1.0, 0.4, 1));
        let (p, a0, m) = kernel_split(2.5).unwrap();
        assert_eq!(m, 3);
        assert!((a0 - 0.5).abs() < 1e-15);
        assert!((p - 1.0 / (1.5 * 0.5)).abs() < 1e-15);
        assert_eq!(kernel_split(2.0), Err(Error::IntegerOrder(2.0)));
    }
}
