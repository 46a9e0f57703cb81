//! Lattice model constructors: Ising chain, square-lattice toric code with a
//! Zeeman field, the toric-code bilayer, and the kagome toric code with Ising
//! or Heisenberg perturbations. All lattices are periodic.
//!
//! Site indexing is row-major over unit cells with a fixed intra-cell order
//! (square lattice: horizontal edge then vertical edge; kagome: the three
//! sublattice sites in fixed order), so observable placement and the
//! translation group are reproducible.

use crate::error::{Error, Result};
use crate::pauli::{PauliSum, PauliTerm};
use crate::stabilizer::{
    build_stabilizer_hamiltonian, complete_ground_state, GroundStateSpec, SignedTerm,
    StabilizerHamiltonian,
};
use crate::translation::{TISum, TranslationGroup};
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::sync::Arc;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TfimState {
    AllUp,
    AllDown,
    Ghz,
    /// Paramagnetic frame: `H0 = -sum X_j`, perturbation `-(1/h) sum Z_j Z_{j+1}`
    /// (the Hamiltonian rescaled by the field strength).
    AllRight,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KagomePerturbation {
    XxIsing(f64),
    ZzIsing(f64),
    Heisenberg(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KagomeFrame {
    XLoops,
    ZLoops,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LoopKind {
    XLoop,
    ZLoop,
}

#[derive(Clone, Debug)]
enum Geometry {
    Chain { n: usize },
    ToricSquare { lx: usize, ly: usize },
    ToricBilayer { lx: usize, ly: usize },
    Kagome { lx: usize, ly: usize },
}

/// A fully assembled experiment: Hamiltonian, perturbation, pinned ground
/// state, named observables, and the translation group when available.
#[derive(Clone, Debug)]
pub struct LatticeModel {
    pub name: String,
    pub nqubits: usize,
    pub h0: StabilizerHamiltonian,
    pub h1: PauliSum,
    pub gs: GroundStateSpec,
    pub observables: BTreeMap<String, PauliSum>,
    pub group: Option<Arc<TranslationGroup>>,
    pub h0_rep: Option<TISum>,
    pub h1_rep: Option<TISum>,
    pub metadata: BTreeMap<String, String>,
    geometry: Geometry,
}

impl LatticeModel {
    pub fn observable(&self, name: &str) -> Result<&PauliSum> {
        self.observables
            .get(name)
            .ok_or_else(|| Error::InvalidInput(format!("unknown observable {name:?}")))
    }

    /// Loop operator of linear extent `k`, reduced to its boundary string.
    /// Returns the operator together with its circumference (the number of
    /// qubits supporting the boundary string).
    pub fn loop_observable(&self, kind: LoopKind, k: usize) -> Result<(PauliSum, usize)> {
        let op = match (&self.geometry, kind) {
            (Geometry::ToricSquare { lx, ly }, LoopKind::XLoop) => {
                let geo = SquareGeometry { lx: *lx, ly: *ly, offset: 0 };
                geo.x_loop(self.nqubits, k)?
            }
            (Geometry::ToricBilayer { lx, ly }, LoopKind::XLoop) => {
                let geo = SquareGeometry { lx: *lx, ly: *ly, offset: 0 };
                geo.x_loop(self.nqubits, k)?
            }
            (Geometry::Kagome { lx, ly }, kind) => {
                let geo = KagomeGeometry { lx: *lx, ly: *ly };
                match kind {
                    LoopKind::XLoop => geo.x_loop(self.nqubits, k)?,
                    LoopKind::ZLoop => geo.z_loop(self.nqubits, k)?,
                }
            }
            _ => {
                return Err(Error::InvalidInput(format!(
                    "loop kind {kind:?} not defined for model {}",
                    self.name
                )))
            }
        };
        let circumference = op.term(0).support();
        Ok((op, circumference))
    }
}

fn single_term(n: usize, sites: &[(usize, char)]) -> PauliTerm {
    PauliTerm::from_sites(n, sites).expect("sites in range")
}

/// Multiply a list of +1 stabilizer strings into their boundary string. The
/// factors are mutually commuting X-type or Z-type products, so no phase can
/// appear.
fn product_of_strings(n: usize, strings: &[PauliTerm]) -> Result<PauliSum> {
    let mut acc = PauliSum::identity(n);
    for s in strings {
        let factor = PauliSum::from_terms(n, &[(c(1.0), s.clone())]);
        acc = acc.multiply(&factor)?;
    }
    debug_assert_eq!(acc.len(), 1);
    debug_assert!((acc.coeff(0) - c(1.0)).norm() < 1e-12);
    Ok(acc)
}

/// Ferromagnetic transverse-field Ising chain with periodic boundaries.
pub fn build_tfim_chain(n: usize, h: f64, state: TfimState) -> Result<LatticeModel> {
    if n < 3 {
        return Err(Error::InvalidInput(format!("chain needs at least 3 qubits, got {n}")));
    }
    let group = TranslationGroup::cyclic(n);
    let bond = |j: usize| single_term(n, &[(j, 'Z'), ((j + 1) % n, 'Z')]);

    let (h0_terms, h1, h0_rep_sum, h1_rep_sum, coupling) = match state {
        TfimState::AllRight => {
            if h <= 0.0 {
                return Err(Error::InvalidInput(
                    "paramagnetic frame needs a positive field".into(),
                ));
            }
            let lambda = 1.0 / h;
            let h0_terms = PauliSum::from_terms(
                n,
                &(0..n).map(|j| (c(-1.0), single_term(n, &[(j, 'X')]))).collect::<Vec<_>>(),
            );
            let h1 = PauliSum::from_terms(
                n,
                &(0..n).map(|j| (c(-lambda), bond(j))).collect::<Vec<_>>(),
            );
            let h0_rep = PauliSum::from_terms(n, &[(c(-1.0), single_term(n, &[(0, 'X')]))]);
            let h1_rep = PauliSum::from_terms(n, &[(c(-lambda), bond(0))]);
            (h0_terms, h1, h0_rep, h1_rep, lambda)
        }
        _ => {
            let h0_terms = PauliSum::from_terms(
                n,
                &(0..n).map(|j| (c(-1.0), bond(j))).collect::<Vec<_>>(),
            );
            let h1 = PauliSum::from_terms(
                n,
                &(0..n).map(|j| (c(-h), single_term(n, &[(j, 'X')]))).collect::<Vec<_>>(),
            );
            let h0_rep = PauliSum::from_terms(n, &[(c(-1.0), bond(0))]);
            let h1_rep = PauliSum::from_terms(n, &[(c(-h), single_term(n, &[(0, 'X')]))]);
            (h0_terms, h1, h0_rep, h1_rep, h)
        }
    };

    let h0 = build_stabilizer_hamiltonian(&h0_terms)?;
    let extra: Vec<SignedTerm> = match state {
        TfimState::AllUp => vec![(1, single_term(n, &[(n - 1, 'Z')]))],
        TfimState::AllDown => vec![(-1, single_term(n, &[(n - 1, 'Z')]))],
        TfimState::Ghz => vec![(1, PauliTerm::from_letters(&"X".repeat(n)).unwrap())],
        TfimState::AllRight => vec![],
    };
    let gs = complete_ground_state(&h0, &extra)?;

    let mut observables = BTreeMap::new();
    let mid = n / 2;
    observables.insert(
        "z".to_string(),
        PauliSum::from_terms(n, &[(c(1.0), single_term(n, &[(mid, 'Z')]))]),
    );
    let i0 = n / 4;
    for d in 1..=(n / 2).min(8) {
        observables.insert(
            format!("yy_{d}"),
            PauliSum::from_terms(n, &[(c(1.0), single_term(n, &[(i0, 'Y'), (i0 + d, 'Y')]))]),
        );
    }

    let mut metadata = BTreeMap::new();
    metadata.insert("geometry".into(), "chain".into());
    metadata.insert("extents".into(), format!("{n}"));
    metadata.insert("boundary".into(), "periodic".into());
    metadata.insert("state".into(), format!("{state:?}"));
    metadata.insert("coupling".into(), format!("{coupling}"));

    Ok(LatticeModel {
        name: "tfim".into(),
        nqubits: n,
        h0,
        h1,
        gs,
        observables,
        h0_rep: Some(TISum::new(h0_rep_sum, Arc::clone(&group))?),
        h1_rep: Some(TISum::new(h1_rep_sum, Arc::clone(&group))?),
        group: Some(group),
        metadata,
        geometry: Geometry::Chain { n },
    })
}

/// Square-lattice toric code geometry: two edge qubits per unit cell.
struct SquareGeometry {
    lx: usize,
    ly: usize,
    /// Qubit-index offset, nonzero for the second layer of a bilayer.
    offset: usize,
}

impl SquareGeometry {
    fn ncells(&self) -> usize {
        self.lx * self.ly
    }

    fn h_edge(&self, x: usize, y: usize) -> usize {
        self.offset + 2 * ((y % self.ly) * self.lx + (x % self.lx))
    }

    fn v_edge(&self, x: usize, y: usize) -> usize {
        self.offset + 2 * ((y % self.ly) * self.lx + (x % self.lx)) + 1
    }

    /// Vertex term: Z on the four edges meeting at vertex (x, y).
    fn vertex_term(&self, n: usize, x: usize, y: usize) -> PauliTerm {
        let xm = (x + self.lx - 1) % self.lx;
        let ym = (y + self.ly - 1) % self.ly;
        single_term(
            n,
            &[
                (self.h_edge(x, y), 'Z'),
                (self.h_edge(xm, y), 'Z'),
                (self.v_edge(x, y), 'Z'),
                (self.v_edge(x, ym), 'Z'),
            ],
        )
    }

    /// Plaquette term: X on the four boundary edges of the face at (x, y).
    fn plaquette_term(&self, n: usize, x: usize, y: usize) -> PauliTerm {
        single_term(
            n,
            &[
                (self.h_edge(x, y), 'X'),
                (self.h_edge(x, y + 1), 'X'),
                (self.v_edge(x, y), 'X'),
                (self.v_edge(x + 1, y), 'X'),
            ],
        )
    }

    /// Global Z-loop winding in x: Z on the vertical edges of row y = 0
    /// (a dual-lattice cycle, sharing two edges with every crossed face).
    fn z_loop_x(&self, n: usize) -> PauliTerm {
        let sites: Vec<(usize, char)> = (0..self.lx).map(|x| (self.v_edge(x, 0), 'Z')).collect();
        single_term(n, &sites)
    }

    /// Global Z-loop winding in y: Z on the horizontal edges of column x = 0.
    fn z_loop_y(&self, n: usize) -> PauliTerm {
        let sites: Vec<(usize, char)> = (0..self.ly).map(|y| (self.h_edge(0, y), 'Z')).collect();
        single_term(n, &sites)
    }

    /// `k x k` tiling of plaquette terms reduced to its boundary string.
    fn x_loop(&self, n: usize, k: usize) -> Result<PauliSum> {
        if k == 0 || k >= self.lx || k >= self.ly {
            return Err(Error::InvalidInput(format!(
                "loop extent {k} does not fit a {}x{} torus",
                self.lx, self.ly
            )));
        }
        let mut factors = Vec::with_capacity(k * k);
        for y in 0..k {
            for x in 0..k {
                factors.push(self.plaquette_term(n, x, y));
            }
        }
        product_of_strings(n, &factors)
    }

    fn translation_group(&self, n: usize) -> Result<Arc<TranslationGroup>> {
        let per_layer = 2 * self.ncells();
        let layers = n / per_layer;
        let mut tx: Vec<u32> = Vec::with_capacity(n);
        let mut ty: Vec<u32> = Vec::with_capacity(n);
        for q in 0..n {
            let layer = q / per_layer;
            let local = q % per_layer;
            let (cell, kind) = (local / 2, local % 2);
            let (x, y) = (cell % self.lx, cell / self.lx);
            let shift = |xx: usize, yy: usize| {
                (layer * per_layer + 2 * ((yy % self.ly) * self.lx + (xx % self.lx)) + kind) as u32
            };
            tx.push(shift(x + 1, y));
            ty.push(shift(x, y + 1));
        }
        let _ = layers;
        TranslationGroup::new(n, vec![tx, ty], vec![self.lx, self.ly])
    }
}

/// Toric code on a periodic square lattice with an aligning Zeeman field
/// `H1 = -h sum_i Z_i`.
pub fn build_toric_square(lx: usize, ly: usize, h_zeeman: f64) -> Result<LatticeModel> {
    if lx < 2 || ly < 2 {
        return Err(Error::InvalidInput(format!("torus extents {lx}x{ly} too small")));
    }
    let geo = SquareGeometry { lx, ly, offset: 0 };
    let n = 2 * geo.ncells();

    let mut terms = Vec::with_capacity(2 * geo.ncells());
    for y in 0..ly {
        for x in 0..lx {
            terms.push((c(-1.0), geo.vertex_term(n, x, y)));
            terms.push((c(-1.0), geo.plaquette_term(n, x, y)));
        }
    }
    let h0 = build_stabilizer_hamiltonian(&PauliSum::from_terms(n, &terms))?;
    let gs = complete_ground_state(
        &h0,
        &[(1, geo.z_loop_x(n)), (1, geo.z_loop_y(n))],
    )?;

    let h1 = PauliSum::from_terms(
        n,
        &(0..n).map(|q| (c(-h_zeeman), single_term(n, &[(q, 'Z')]))).collect::<Vec<_>>(),
    );

    let mut observables = BTreeMap::new();
    for k in 1..=5.min(lx.min(ly) - 1) {
        observables.insert(format!("x_loop_{k}"), geo.x_loop(n, k)?);
    }
    for d in 0..=lx / 2 {
        observables.insert(
            format!("plaq_{d}"),
            PauliSum::from_terms(n, &[(c(1.0), geo.plaquette_term(n, d, 0))]),
        );
    }

    let group = geo.translation_group(n)?;
    let h0_rep = TISum::new(
        PauliSum::from_terms(
            n,
            &[(c(-1.0), geo.vertex_term(n, 0, 0)), (c(-1.0), geo.plaquette_term(n, 0, 0))],
        ),
        Arc::clone(&group),
    )?;
    let h1_rep = TISum::new(
        PauliSum::from_terms(
            n,
            &[
                (c(-h_zeeman), single_term(n, &[(geo.h_edge(0, 0), 'Z')])),
                (c(-h_zeeman), single_term(n, &[(geo.v_edge(0, 0), 'Z')])),
            ],
        ),
        Arc::clone(&group),
    )?;

    let mut metadata = BTreeMap::new();
    metadata.insert("geometry".into(), "toric_square".into());
    metadata.insert("extents".into(), format!("{lx}x{ly}"));
    metadata.insert("boundary".into(), "periodic".into());
    metadata.insert("coupling".into(), format!("{h_zeeman}"));

    Ok(LatticeModel {
        name: "toric".into(),
        nqubits: n,
        h0,
        h1,
        gs,
        observables,
        h0_rep: Some(h0_rep),
        h1_rep: Some(h1_rep),
        group: Some(group),
        metadata,
        geometry: Geometry::ToricSquare { lx, ly },
    })
}

/// Two stacked toric-code layers coupled by an interlayer Ising term
/// `H1 = -J sum_i Z_i^(1) Z_i^(2)`.
pub fn build_toric_bilayer(lx: usize, ly: usize, j: f64) -> Result<LatticeModel> {
    if lx < 2 || ly < 2 {
        return Err(Error::InvalidInput(format!("torus extents {lx}x{ly} too small")));
    }
    let per_layer = 2 * lx * ly;
    let n = 2 * per_layer;
    let layer = |offset: usize| SquareGeometry { lx, ly, offset };
    let (g1, g2) = (layer(0), layer(per_layer));

    let mut terms = Vec::with_capacity(4 * lx * ly);
    for geo in [&g1, &g2] {
        for y in 0..ly {
            for x in 0..lx {
                terms.push((c(-1.0), geo.vertex_term(n, x, y)));
                terms.push((c(-1.0), geo.plaquette_term(n, x, y)));
            }
        }
    }
    let h0 = build_stabilizer_hamiltonian(&PauliSum::from_terms(n, &terms))?;
    let gs = complete_ground_state(
        &h0,
        &[
            (1, g1.z_loop_x(n)),
            (1, g1.z_loop_y(n)),
            (1, g2.z_loop_x(n)),
            (1, g2.z_loop_y(n)),
        ],
    )?;

    let h1 = if j == 0.0 {
        PauliSum::zero(n)
    } else {
        PauliSum::from_terms(
            n,
            &(0..per_layer)
                .map(|q| (c(-j), single_term(n, &[(q, 'Z'), (q + per_layer, 'Z')])))
                .collect::<Vec<_>>(),
        )
    };

    let mut observables = BTreeMap::new();
    for k in 1..=5.min(lx.min(ly) - 1) {
        observables.insert(format!("x_loop_{k}"), g1.x_loop(n, k)?);
        observables.insert(format!("x_loop_l2_{k}"), g2.x_loop(n, k)?);
    }

    let group = g1.translation_group(n)?;
    let h0_rep = TISum::new(
        PauliSum::from_terms(
            n,
            &[
                (c(-1.0), g1.vertex_term(n, 0, 0)),
                (c(-1.0), g1.plaquette_term(n, 0, 0)),
                (c(-1.0), g2.vertex_term(n, 0, 0)),
                (c(-1.0), g2.plaquette_term(n, 0, 0)),
            ],
        ),
        Arc::clone(&group),
    )?;
    let h1_rep = if j == 0.0 {
        TISum::zero(Arc::clone(&group))
    } else {
        TISum::new(
            PauliSum::from_terms(
                n,
                &[
                    (
                        c(-j),
                        single_term(n, &[(g1.h_edge(0, 0), 'Z'), (g2.h_edge(0, 0), 'Z')]),
                    ),
                    (
                        c(-j),
                        single_term(n, &[(g1.v_edge(0, 0), 'Z'), (g2.v_edge(0, 0), 'Z')]),
                    ),
                ],
            ),
            Arc::clone(&group),
        )?
    };

    let mut metadata = BTreeMap::new();
    metadata.insert("geometry".into(), "toric_bilayer".into());
    metadata.insert("extents".into(), format!("{lx}x{ly}"));
    metadata.insert("boundary".into(), "periodic".into());
    metadata.insert("coupling".into(), format!("{j}"));

    Ok(LatticeModel {
        name: "bilayer".into(),
        nqubits: n,
        h0,
        h1,
        gs,
        observables,
        h0_rep: Some(h0_rep),
        h1_rep: Some(h1_rep),
        group: Some(group),
        metadata,
        geometry: Geometry::ToricBilayer { lx, ly },
    })
}

/// Kagome lattice as the medial lattice of a honeycomb: three sites per unit
/// cell, triangles around honeycomb vertices, hexagons around honeycomb
/// faces.
struct KagomeGeometry {
    lx: usize,
    ly: usize,
}

impl KagomeGeometry {
    fn ncells(&self) -> usize {
        self.lx * self.ly
    }

    fn site(&self, x: usize, y: usize, s: usize) -> usize {
        3 * ((y % self.ly) * self.lx + (x % self.lx)) + s
    }

    /// "Up" triangle: the star of honeycomb vertex u(x, y).
    fn triangle_up(&self, n: usize, x: usize, y: usize) -> PauliTerm {
        let xm = (x + self.lx - 1) % self.lx;
        let ym = (y + self.ly - 1) % self.ly;
        single_term(
            n,
            &[
                (self.site(x, y, 0), 'X'),
                (self.site(xm, y, 1), 'X'),
                (self.site(x, ym, 2), 'X'),
            ],
        )
    }

    /// "Down" triangle: the star of honeycomb vertex v(x, y).
    fn triangle_down(&self, n: usize, x: usize, y: usize) -> PauliTerm {
        single_term(
            n,
            &[
                (self.site(x, y, 0), 'X'),
                (self.site(x, y, 1), 'X'),
                (self.site(x, y, 2), 'X'),
            ],
        )
    }

    /// Hexagon term: Z on the six sites around honeycomb face (x, y).
    fn hexagon(&self, n: usize, x: usize, y: usize) -> PauliTerm {
        single_term(
            n,
            &[
                (self.site(x, y, 1), 'Z'),
                (self.site(x + 1, y, 0), 'Z'),
                (self.site(x + 1, y, 2), 'Z'),
                (self.site(x, y + 1, 1), 'Z'),
                (self.site(x, y + 1, 0), 'Z'),
                (self.site(x, y, 2), 'Z'),
            ],
        )
    }

    /// Nearest-neighbor pairs: the three sides of every triangle.
    fn nn_bonds(&self) -> Vec<(usize, usize)> {
        let n = 3 * self.ncells();
        let mut bonds = Vec::with_capacity(2 * n);
        for y in 0..self.ly {
            for x in 0..self.lx {
                let xm = (x + self.lx - 1) % self.lx;
                let ym = (y + self.ly - 1) % self.ly;
                let up = [self.site(x, y, 0), self.site(xm, y, 1), self.site(x, ym, 2)];
                let down = [self.site(x, y, 0), self.site(x, y, 1), self.site(x, y, 2)];
                for tri in [up, down] {
                    bonds.push((tri[0], tri[1]));
                    bonds.push((tri[0], tri[2]));
                    bonds.push((tri[1], tri[2]));
                }
            }
        }
        bonds
    }

    /// Global X-loop winding in x: the sublattice-2 sites of row y = 0 (a
    /// dual cycle crossing each hexagon of that row twice).
    fn x_loop_global_x(&self, n: usize) -> PauliTerm {
        let sites: Vec<(usize, char)> = (0..self.lx).map(|x| (self.site(x, 0, 2), 'X')).collect();
        single_term(n, &sites)
    }

    /// Global X-loop winding in y: the sublattice-1 sites of column x = 0.
    fn x_loop_global_y(&self, n: usize) -> PauliTerm {
        let sites: Vec<(usize, char)> = (0..self.ly).map(|y| (self.site(0, y, 1), 'X')).collect();
        single_term(n, &sites)
    }

    /// Global Z-loop winding in x: alternating sublattice-0/1 sites of row 0
    /// (a direct-lattice cycle through u and v vertices).
    fn z_loop_global_x(&self, n: usize) -> PauliTerm {
        let mut sites = Vec::with_capacity(2 * self.lx);
        for x in 0..self.lx {
            sites.push((self.site(x, 0, 0), 'Z'));
            sites.push((self.site(x, 0, 1), 'Z'));
        }
        single_term(n, &sites)
    }

    /// Global Z-loop winding in y through sublattices 0 and 2.
    fn z_loop_global_y(&self, n: usize) -> PauliTerm {
        let mut sites = Vec::with_capacity(2 * self.ly);
        for y in 0..self.ly {
            sites.push((self.site(0, y, 0), 'Z'));
            sites.push((self.site(0, y, 2), 'Z'));
        }
        single_term(n, &sites)
    }

    /// Product of both triangles over a `k x k` block of cells.
    fn x_loop(&self, n: usize, k: usize) -> Result<PauliSum> {
        if k == 0 || k >= self.lx || k >= self.ly {
            return Err(Error::InvalidInput(format!(
                "loop extent {k} does not fit a {}x{} kagome torus",
                self.lx, self.ly
            )));
        }
        let mut factors = Vec::with_capacity(2 * k * k);
        for y in 0..k {
            for x in 0..k {
                factors.push(self.triangle_up(n, x, y));
                factors.push(self.triangle_down(n, x, y));
            }
        }
        product_of_strings(n, &factors)
    }

    /// Product of hexagons over a `k x k` block of cells.
    fn z_loop(&self, n: usize, k: usize) -> Result<PauliSum> {
        if k == 0 || k >= self.lx || k >= self.ly {
            return Err(Error::InvalidInput(format!(
                "loop extent {k} does not fit a {}x{} kagome torus",
                self.lx, self.ly
            )));
        }
        let mut factors = Vec::with_capacity(k * k);
        for y in 0..k {
            for x in 0..k {
                factors.push(self.hexagon(n, x, y));
            }
        }
        product_of_strings(n, &factors)
    }

    fn translation_group(&self, n: usize) -> Result<Arc<TranslationGroup>> {
        let mut tx: Vec<u32> = Vec::with_capacity(n);
        let mut ty: Vec<u32> = Vec::with_capacity(n);
        for q in 0..n {
            let (cell, s) = (q / 3, q % 3);
            let (x, y) = (cell % self.lx, cell / self.lx);
            tx.push(self.site(x + 1, y, s) as u32);
            ty.push(self.site(x, y + 1, s) as u32);
        }
        TranslationGroup::new(n, vec![tx, ty], vec![self.lx, self.ly])
    }
}

/// Toric code on the kagome lattice, `H0 = -sum A_t - sum B_h`, perturbed by
/// nearest-neighbor Ising or Heisenberg coupling.
pub fn build_kagome_tc(
    lx: usize,
    ly: usize,
    perturbation: KagomePerturbation,
    frame: KagomeFrame,
) -> Result<LatticeModel> {
    if lx < 2 || ly < 2 {
        return Err(Error::InvalidInput(format!("kagome extents {lx}x{ly} too small")));
    }
    let geo = KagomeGeometry { lx, ly };
    let n = 3 * geo.ncells();

    let mut terms = Vec::with_capacity(3 * geo.ncells());
    for y in 0..ly {
        for x in 0..lx {
            terms.push((c(-1.0), geo.triangle_up(n, x, y)));
            terms.push((c(-1.0), geo.triangle_down(n, x, y)));
            terms.push((c(-1.0), geo.hexagon(n, x, y)));
        }
    }
    let h0 = build_stabilizer_hamiltonian(&PauliSum::from_terms(n, &terms))?;

    let extra: Vec<SignedTerm> = match frame {
        KagomeFrame::XLoops => {
            vec![(1, geo.x_loop_global_x(n)), (1, geo.x_loop_global_y(n))]
        }
        KagomeFrame::ZLoops => {
            vec![(1, geo.z_loop_global_x(n)), (1, geo.z_loop_global_y(n))]
        }
    };
    let gs = complete_ground_state(&h0, &extra)?;

    let bonds = geo.nn_bonds();
    let mut h1_terms: Vec<(Complex64, PauliTerm)> = Vec::new();
    let coupling = match perturbation {
        KagomePerturbation::XxIsing(j) => {
            for &(a, b) in &bonds {
                h1_terms.push((c(j), single_term(n, &[(a, 'X'), (b, 'X')])));
            }
            j
        }
        KagomePerturbation::ZzIsing(j) => {
            for &(a, b) in &bonds {
                h1_terms.push((c(j), single_term(n, &[(a, 'Z'), (b, 'Z')])));
            }
            j
        }
        KagomePerturbation::Heisenberg(j) => {
            for &(a, b) in &bonds {
                h1_terms.push((c(j), single_term(n, &[(a, 'X'), (b, 'X')])));
                h1_terms.push((c(j), single_term(n, &[(a, 'Y'), (b, 'Y')])));
                h1_terms.push((c(j), single_term(n, &[(a, 'Z'), (b, 'Z')])));
            }
            j
        }
    };
    let h1 = PauliSum::from_terms(n, &h1_terms);

    // the chosen frame is only a good quantum number when its global loops
    // commute with the perturbation
    let frame_commutes = {
        let extra_sum = PauliSum::from_terms(
            n,
            &extra.iter().map(|(_, t)| (c(1.0), t.clone())).collect::<Vec<_>>(),
        );
        h1.commutator(&extra_sum)?.is_empty()
    };

    let mut observables = BTreeMap::new();
    for k in 1..=4.min(lx.min(ly) - 1) {
        observables.insert(format!("x_loop_{k}"), geo.x_loop(n, k)?);
        observables.insert(format!("z_loop_{k}"), geo.z_loop(n, k)?);
    }

    let group = geo.translation_group(n)?;
    let h0_rep = TISum::new(
        PauliSum::from_terms(
            n,
            &[
                (c(-1.0), geo.triangle_up(n, 0, 0)),
                (c(-1.0), geo.triangle_down(n, 0, 0)),
                (c(-1.0), geo.hexagon(n, 0, 0)),
            ],
        ),
        Arc::clone(&group),
    )?;

    let mut metadata = BTreeMap::new();
    metadata.insert("geometry".into(), "kagome".into());
    metadata.insert("extents".into(), format!("{lx}x{ly}"));
    metadata.insert("boundary".into(), "periodic".into());
    metadata.insert("frame".into(), format!("{frame:?}"));
    metadata.insert("perturbation".into(), format!("{perturbation:?}"));
    metadata.insert("coupling".into(), format!("{coupling}"));
    metadata.insert(
        "shape_convention".into(),
        "loops tile k x k rhombic blocks of unit cells; circumference is the qubit count of the boundary string".into(),
    );
    if !frame_commutes {
        metadata.insert(
            "frame_warning".into(),
            "global loops of the chosen frame do not commute with the perturbation".into(),
        );
    }

    Ok(LatticeModel {
        name: "kagome".into(),
        nqubits: n,
        h0,
        h1,
        gs,
        observables,
        h0_rep: Some(h0_rep),
        h1_rep: None,
        group: Some(group),
        metadata,
        geometry: Geometry::Kagome { lx, ly },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tfim_chain_counts() {
        let m = build_tfim_chain(100, 0.2, TfimState::AllUp).unwrap();
        assert_eq!(m.nqubits, 100);
        assert_eq!(m.h0.num_terms(), 100);
        assert_eq!(m.h0.num_generators(), 99);
        assert_eq!(m.gs.rows().len(), 100);
    }

    #[test]
    fn tfim_ghz_frame() {
        let m = build_tfim_chain(6, 0.2, TfimState::Ghz).unwrap();
        let last = &m.gs.rows()[5];
        assert_eq!(last.letters(), "XXXXXX");
        assert_eq!(m.gs.signs()[5], 1);
    }

    #[test]
    fn tfim_rejects_degenerate_ring() {
        assert!(build_tfim_chain(2, 0.2, TfimState::AllUp).is_err());
    }

    #[test]
    fn tfim_pm_frame_is_complete_without_extras() {
        let m = build_tfim_chain(8, 2.0, TfimState::AllRight).unwrap();
        assert_eq!(m.h0.num_generators(), 8);
        // perturbation coupling is 1/h
        assert!((m.h1.coeff(0).re + 0.5).abs() < 1e-15);
    }

    #[test]
    fn toric_square_counts() {
        let m = build_toric_square(4, 4, 0.1).unwrap();
        assert_eq!(m.nqubits, 32);
        assert_eq!(m.h0.num_terms(), 32);
        // one vertex and one plaquette relation on the torus
        assert_eq!(m.h0.num_generators(), 30);
        assert_eq!(m.gs.rows().len(), 32);
    }

    #[test]
    fn toric_10x10_has_200_qubits() {
        let m = build_toric_square(10, 10, 0.1).unwrap();
        assert_eq!(m.nqubits, 200);
    }

    #[test]
    fn toric_loops_commute_with_zeeman() {
        let m = build_toric_square(4, 4, 0.3).unwrap();
        let loops = PauliSum::from_terms(
            m.nqubits,
            &[
                (c(1.0), m.gs.rows()[30].clone()),
                (c(1.0), m.gs.rows()[31].clone()),
            ],
        );
        assert!(m.h1.commutator(&loops).unwrap().is_empty());
    }

    #[test]
    fn toric_x_loop_circumference() {
        let m = build_toric_square(4, 4, 0.1).unwrap();
        let (op1, c1) = m.loop_observable(LoopKind::XLoop, 1).unwrap();
        assert_eq!(c1, 4);
        assert_eq!(op1.len(), 1);
        let (_, c2) = m.loop_observable(LoopKind::XLoop, 2).unwrap();
        assert_eq!(c2, 8);
        let (_, c3) = m.loop_observable(LoopKind::XLoop, 3).unwrap();
        assert_eq!(c3, 12);
    }

    #[test]
    fn bilayer_counts() {
        let m = build_toric_bilayer(3, 3, 0.5).unwrap();
        assert_eq!(m.nqubits, 36);
        assert_eq!(m.h0.num_generators(), 36 - 4);
        assert_eq!(m.gs.rows().len(), 36);
        assert_eq!(m.h1.len(), 18);
    }

    #[test]
    fn bilayer_zero_coupling_empty_h1() {
        let m = build_toric_bilayer(2, 2, 0.0).unwrap();
        assert!(m.h1.is_empty());
    }

    #[test]
    fn kagome_counts() {
        let m = build_kagome_tc(4, 4, KagomePerturbation::XxIsing(0.1), KagomeFrame::XLoops)
            .unwrap();
        assert_eq!(m.nqubits, 48);
        // 2 LxLy triangles + LxLy hexagons, one relation in each family
        assert_eq!(m.h0.num_terms(), 48);
        assert_eq!(m.h0.num_generators(), 46);
        assert_eq!(m.gs.rows().len(), 48);
    }

    #[test]
    fn kagome_10x10_has_300_qubits() {
        let m = build_kagome_tc(10, 10, KagomePerturbation::ZzIsing(0.1), KagomeFrame::ZLoops)
            .unwrap();
        assert_eq!(m.nqubits, 300);
    }

    #[test]
    fn kagome_heisenberg_bond_count() {
        let (lx, ly) = (4, 3);
        let m = build_kagome_tc(lx, ly, KagomePerturbation::Heisenberg(0.1), KagomeFrame::XLoops)
            .unwrap();
        // coordination 4: 6 LxLy bonds, three Pauli flavors each
        assert_eq!(m.h1.len(), 3 * 6 * lx * ly);
    }

    #[test]
    fn kagome_frames_are_good_quantum_numbers_when_matched() {
        let xx = build_kagome_tc(3, 3, KagomePerturbation::XxIsing(0.2), KagomeFrame::XLoops)
            .unwrap();
        assert!(!xx.metadata.contains_key("frame_warning"));
        let zz = build_kagome_tc(3, 3, KagomePerturbation::ZzIsing(0.2), KagomeFrame::ZLoops)
            .unwrap();
        assert!(!zz.metadata.contains_key("frame_warning"));
        // mismatch is allowed but flagged
        let bad = build_kagome_tc(3, 3, KagomePerturbation::ZzIsing(0.2), KagomeFrame::XLoops)
            .unwrap();
        assert!(bad.metadata.contains_key("frame_warning"));
    }

    #[test]
    fn kagome_loop_circumferences() {
        let m = build_kagome_tc(4, 4, KagomePerturbation::XxIsing(0.1), KagomeFrame::XLoops)
            .unwrap();
        let (_, cz1) = m.loop_observable(LoopKind::ZLoop, 1).unwrap();
        assert_eq!(cz1, 6, "single hexagon");
        let (_, cx1) = m.loop_observable(LoopKind::XLoop, 1).unwrap();
        assert_eq!(cx1, 4, "up and down triangle of one cell");
        let (_, cz2) = m.loop_observable(LoopKind::ZLoop, 2).unwrap();
        assert_eq!(cz2, 14, "2x2 hexagon block");
        let (_, cx2) = m.loop_observable(LoopKind::XLoop, 2).unwrap();
        assert_eq!(cx2, 8);
    }

    #[test]
    fn loop_extent_overflow_rejected() {
        let m = build_toric_square(3, 3, 0.1).unwrap();
        assert!(m.loop_observable(LoopKind::XLoop, 3).is_err());
    }

    #[test]
    fn loop_order0_expectation_is_one() {
        use crate::observables::expectation_order0;
        let m = build_toric_square(4, 4, 0.1).unwrap();
        for k in 1..=3 {
            let (op, _) = m.loop_observable(LoopKind::XLoop, k).unwrap();
            let v = expectation_order0(&op, &m.gs).unwrap();
            assert!((v - c(1.0)).norm() < 1e-14, "k={k}");
        }
        let mk = build_kagome_tc(4, 4, KagomePerturbation::Heisenberg(0.1), KagomeFrame::XLoops)
            .unwrap();
        for k in 1..=3 {
            for kind in [LoopKind::XLoop, LoopKind::ZLoop] {
                let (op, _) = mk.loop_observable(kind, k).unwrap();
                let v = expectation_order0(&op, &mk.gs).unwrap();
                assert!((v - c(1.0)).norm() < 1e-14, "k={k} {kind:?}");
            }
        }
    }

    #[test]
    fn ti_reps_expand_to_hamiltonians() {
        let m = build_toric_square(3, 3, 0.2).unwrap();
        assert_eq!(&m.h0_rep.as_ref().unwrap().expand_full(), m.h0.terms());
        assert_eq!(&m.h1_rep.as_ref().unwrap().expand_full(), &m.h1);

        let t = build_tfim_chain(8, 0.4, TfimState::AllUp).unwrap();
        assert_eq!(&t.h0_rep.as_ref().unwrap().expand_full(), t.h0.terms());
        assert_eq!(&t.h1_rep.as_ref().unwrap().expand_full(), &t.h1);
    }
}
