use faer::c64;

use super::real;

pub const CUTOFF: usize = 40;

/// Two single-mode squeezed vacua in a truncated Fock space, |n0, n1>.
pub struct Fock {
    pub dim: usize,
}

pub type Ket = Vec<c64>;

impl Fock {
    fn idx(&self, n0: usize, n1: usize) -> usize {
        n0 * self.dim + n1
    }

    pub fn squeezed(&self, r: [f64; 2]) -> Ket {
        let single = |r: f64| -> Vec<f64> {
            let mut c = vec![0.0; self.dim];
            let t = r.tanh();
            let mut amp = 1.0 / r.cosh().sqrt();
            for k in 0..=(self.dim - 1) / 2 {
                c[2 * k] = amp;
                // c_{2k+2} / c_{2k} = t sqrt((2k+1)(2k+2)) / (2k+2)
                amp *= t * (((2 * k + 1) * (2 * k + 2)) as f64).sqrt() / (2 * k + 2) as f64;
            }
            c
        };
        let (a, b) = (single(r[0]), single(r[1]));
        let mut psi = vec![real(0.0); self.dim * self.dim];
        for n0 in 0..self.dim {
            for n1 in 0..self.dim {
                psi[self.idx(n0, n1)] = real(a[n0] * b[n1]);
            }
        }
        psi
    }

    pub fn lower(&self, mode: usize, psi: &Ket) -> Ket {
        let mut out = vec![real(0.0); psi.len()];
        for n0 in 0..self.dim {
            for n1 in 0..self.dim {
                let (n, target) = if mode == 0 {
                    (n0, n0.checked_sub(1).map(|m| self.idx(m, n1)))
                } else {
                    (n1, n1.checked_sub(1).map(|m| self.idx(n0, m)))
                };
                if let Some(t) = target {
                    out[t] += psi[self.idx(n0, n1)] * (n as f64).sqrt();
                }
            }
        }
        out
    }

    pub fn raise(&self, mode: usize, psi: &Ket) -> Ket {
        let mut out = vec![real(0.0); psi.len()];
        for n0 in 0..self.dim {
            for n1 in 0..self.dim {
                let (n, target) = if mode == 0 {
                    (n0, (n0 + 1 < self.dim).then(|| self.idx(n0 + 1, n1)))
                } else {
                    (n1, (n1 + 1 < self.dim).then(|| self.idx(n0, n1 + 1)))
                };
                if let Some(t) = target {
                    out[t] += psi[self.idx(n0, n1)] * ((n + 1) as f64).sqrt();
                }
            }
        }
        out
    }
}

pub fn braket(a: &Ket, b: &Ket) -> c64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn axpy(acc: &mut Ket, s: c64, x: &Ket) {
    for (a, b) in acc.iter_mut().zip(x) {
        *a += s * b;
    }
}

/// O_nm = sum_j conj(U_jn) d_j U_jm with U = u sqrt(dw).
fn gram(u: &[Vec<c64>], dw: f64, d: &[f64], e: &[f64]) -> [[c64; 2]; 2] {
    let mut o = [[real(0.0); 2]; 2];
    for n in 0..2 {
        for m in 0..2 {
            o[n][m] = (0..d.len()).map(|j| u[n][j].conj() * d[j] * e[j] * u[m][j]).sum::<c64>() * dw;
        }
    }
    o
}

/// <N_d>, <N_e> and Cov(N_d, N_e) by brute force. Grid modes outside the
/// Schmidt span are in vacuum, so N_e |psi> carries at most one photon there.
pub fn fock_moments(u: &[Vec<c64>], dw: f64, r: [f64; 2], d: &[f64], e: &[f64]) -> (f64, f64, f64) {
    let f = Fock { dim: CUTOFF };
    let psi = f.squeezed(r);
    let ones = vec![1.0; d.len()];
    let od = gram(u, dw, d, &ones);
    let oe = gram(u, dw, e, &ones);
    let lowered = [f.lower(0, &psi), f.lower(1, &psi)];
    let apply = |o: &[[c64; 2]; 2]| {
        let mut out = vec![real(0.0); psi.len()];
        for n in 0..2 {
            let up = [f.raise(n, &lowered[0]), f.raise(n, &lowered[1])];
            for m in 0..2 {
                axpy(&mut out, o[n][m], &up[m]);
            }
        }
        out
    };
    let (nd, ne) = (apply(&od), apply(&oe));
    let mean_d = braket(&psi, &nd).re;
    let mean_e = braket(&psi, &ne).re;
    // complement part: Ut^dag D (1 - Ut Ut^dag) E Ut
    let de = gram(u, dw, d, e);
    let mut leak = [[real(0.0); 2]; 2];
    for n in 0..2 {
        for m in 0..2 {
            leak[n][m] = de[n][m] - (0..2).map(|l| od[n][l] * oe[l][m]).sum::<c64>();
        }
    }
    let mut second = braket(&nd, &ne);
    for n in 0..2 {
        for m in 0..2 {
            second += leak[n][m] * braket(&lowered[n], &lowered[m]);
        }
    }
    (mean_d, mean_e, second.re - mean_d * mean_e)
}
