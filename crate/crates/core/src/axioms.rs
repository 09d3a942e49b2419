//! Symbolic verification of the Courant axioms on frame sections.

use crate::algebra::Element;
use crate::linalg::{rat, UniPoly};
use crate::model::{Axiom, AxiomCheck, AxiomReport, CourantModel};

struct Tally {
    axiom: Axiom,
    cases: usize,
    failures: usize,
    witness: Option<(String, Element)>,
}

impl Tally {
    fn new(axiom: Axiom) -> Self {
        Tally { axiom, cases: 0, failures: 0, witness: None }
    }

    fn record(&mut self, label: impl FnOnce() -> String, residual: Element) {
        self.cases += 1;
        if !residual.is_zero() {
            self.failures += 1;
            if self.witness.is_none() {
                self.witness = Some((label(), residual));
            }
        }
    }

    fn finish(self) -> AxiomCheck {
        AxiomCheck { axiom: self.axiom, cases: self.cases, failures: self.failures, witness: self.witness }
    }
}

pub(crate) fn report(model: &CourantModel) -> AxiomReport {
    let ctx = model.context();
    let r = model.fiber_rank();
    let e: Vec<Element> = (0..r).map(|b| model.section(b)).collect();
    let t = UniPoly::t();
    let te: Vec<Element> = e.iter().map(|x| x.scale(&t)).collect();
    let br = |a: &Element, b: &Element| model.derived_bracket_unchecked(a, b).expect("same context");
    let pair = |a: &Element, b: &Element| a.poisson_bracket(b).expect("same context");
    let rho = |psi: &Element, f: &Element| -> Element {
        psi.poisson_bracket(model.hamiltonian()).and_then(|v| v.poisson_bracket(f)).expect("same context")
    };
    let name = |a: usize| format!("e{}", a + 1);

    let mut brackets = vec![vec![Element::zero(ctx); r]; r];
    for a in 0..r {
        for b in 0..r {
            brackets[a][b] = br(&e[a], &e[b]);
        }
    }

    let mut jacobi = Tally::new(Axiom::Jacobi);
    for a in 0..r {
        for b in 0..r {
            for c in 0..r {
                let lhs = br(&e[a], &brackets[b][c]);
                let rhs = &br(&brackets[a][b], &e[c]) + &br(&e[b], &brackets[a][c]);
                jacobi.record(|| format!("({}, {}, {})", name(a), name(b), name(c)), &lhs - &rhs);
            }
        }
    }

    let tf = Element::constant(ctx, t.clone());
    let mut leibniz = Tally::new(Axiom::Leibniz);
    for a in 0..r {
        for b in 0..r {
            let lhs = br(&e[a], &te[b]);
            let rhs = &(&rho(&e[a], &tf) * &e[b]) + &brackets[a][b].scale(&t);
            leibniz.record(|| format!("({}, t*{})", name(a), name(b)), &lhs - &rhs);
        }
    }

    let half = UniPoly::constant(rat(1, 2));
    let mut skew = Tally::new(Axiom::NormalizedSkew);
    let mut candidates: Vec<(String, Element)> = Vec::new();
    for a in 0..r {
        candidates.push((name(a), e[a].clone()));
        candidates.push((format!("t*{}", name(a)), te[a].clone()));
        for b in a + 1..r {
            candidates.push((format!("{}+{}", name(a), name(b)), &e[a] + &e[b]));
        }
    }
    for (label, phi) in &candidates {
        let pp = br(phi, phi);
        let norm = pair(phi, phi);
        for c in 0..r {
            let lhs = pair(&pp, &e[c]);
            let rhs = rho(&e[c], &norm).scale(&half);
            skew.record(|| format!("({label}; {})", name(c)), &lhs - &rhs);
        }
    }

    let mut invariance = Tally::new(Axiom::AdInvariance);
    for a in 0..r {
        for b in 0..r {
            for (c, chi) in e.iter().chain(te.iter()).enumerate() {
                let lhs = rho(&e[a], &pair(&e[b], chi));
                let rhs = &pair(&brackets[a][b], chi) + &pair(&e[b], &br(&e[a], chi));
                let chi_name = if c < r { name(c) } else { format!("t*{}", name(c - r)) };
                invariance.record(|| format!("({}, {}, {chi_name})", name(a), name(b)), &lhs - &rhs);
            }
        }
    }

    let mut preservation = Tally::new(Axiom::BracketPreservation);
    let anchors: Vec<Element> = e.iter().map(|x| model.anchor_vector(x).expect("same context")).collect();
    for a in 0..r {
        for b in 0..r {
            let lhs = model.anchor_vector(&brackets[a][b]).expect("same context");
            let rhs = anchors[a].poisson_bracket(&anchors[b]).expect("same context");
            preservation.record(|| format!("({}, {}) on momenta", name(a), name(b)), &lhs - &rhs);
            let lhs = rho(&brackets[a][b], &tf);
            let rhs = &rho(&e[a], &rho(&e[b], &tf)) - &rho(&e[b], &rho(&e[a], &tf));
            preservation.record(|| format!("({}, {}) on t", name(a), name(b)), &lhs - &rhs);
        }
    }

    AxiomReport {
        checks: vec![jacobi.finish(), leibniz.finish(), skew.finish(), invariance.finish(), preservation.finish()],
        master_equation: model.master_equation(),
    }
}
