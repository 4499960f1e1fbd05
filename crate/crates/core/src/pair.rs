//! JSON pair files: canonical texts of `V`, `Ṽ`, `A` and whatever a kind
//! needs to re-run its checks. Verification always works from the texts in
//! the file, so a hand-edited file is checked as written.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::check::CheckReport;
use crate::error::{Error, Result};
use crate::expr::{parse_rational_expr, parse_trig, Coefficient, Frame, LinOp, MultiIndex, QSqrt2, RationalExpr, TrigPoly, VarNames, VarSet};
use crate::iso3d_first::{check_axial, check_screw, check_translational, AxialPair, ScrewSystem, TranslationalPair};
use crate::iso3d_second::{build_family, check_family, Family3D, FamilyParams, SingularLines};
use crate::spectra::SpectralPair;
use crate::susy1d::{check_pair, PartnerPair1D};

type Q = QSqrt2;
type R = RationalExpr<Q>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairKind {
    #[serde(rename = "1d-order1")]
    Order1,
    #[serde(rename = "1d-order2")]
    Order2,
    #[serde(rename = "3d-translational")]
    Translational,
    #[serde(rename = "3d-axial")]
    Axial,
    #[serde(rename = "3d-screw")]
    Screw,
    #[serde(rename = "3d-family")]
    Family,
}

impl PairKind {
    pub const ALL: [PairKind; 6] = [PairKind::Order1, PairKind::Order2, PairKind::Translational, PairKind::Axial, PairKind::Screw, PairKind::Family];

    pub fn name(self) -> &'static str {
        match self {
            PairKind::Order1 => "1d-order1",
            PairKind::Order2 => "1d-order2",
            PairKind::Translational => "3d-translational",
            PairKind::Axial => "3d-axial",
            PairKind::Screw => "3d-screw",
            PairKind::Family => "3d-family",
        }
    }

    fn names(self) -> VarNames {
        match self {
            PairKind::Order1 | PairKind::Order2 => VarNames::one_dim(),
            PairKind::Translational => VarNames::xyz(),
            PairKind::Axial | PairKind::Screw => VarNames::cylindrical(),
            PairKind::Family => VarNames::cartesian(),
        }
    }

    fn var_set(self) -> VarSet {
        match self {
            PairKind::Order1 | PairKind::Order2 => VarSet::Line,
            PairKind::Translational | PairKind::Family => VarSet::Space,
            PairKind::Axial | PairKind::Screw => VarSet::Cylinder,
        }
    }
}

impl std::str::FromStr for PairKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        PairKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidRequest(format!("unknown kind '{}'", s)))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpTerm {
    pub alpha: MultiIndex,
    pub coeff: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySection {
    pub params: FamilyParams<Q>,
    /// `v1 v2 v3 w beta_plus beta_minus beta_plus_prime beta_minus_prime
    /// alpha1 alpha2 gamma1 gamma2 V3`.
    pub components: BTreeMap<String, String>,
    pub singular_lines: SingularLines,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairFile {
    pub kind: PairKind,
    pub frame: Frame,
    pub dim: usize,
    /// Order of `A`.
    pub order: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Q>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<Q>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_z: Option<Q>,
    #[serde(rename = "V")]
    pub v: String,
    #[serde(rename = "Vtilde")]
    pub vt: String,
    #[serde(rename = "A")]
    pub a: Vec<OpTerm>,
    /// Kind-specific inputs such as `w`, `v`, `V_yz`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extras: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilySection>,
}

fn op_terms<C: Coefficient>(a: &LinOp<C>, names: &VarNames) -> Vec<OpTerm> {
    a.terms().map(|(alpha, c)| OpTerm { alpha: *alpha, coeff: c.to_text(names) }).collect()
}

fn extras<const N: usize>(pairs: [(&str, String); N]) -> BTreeMap<String, String> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

impl PairFile {
    pub fn from_1d(p: &PartnerPair1D<Q>) -> Self {
        let kind = if p.order == 1 { PairKind::Order1 } else { PairKind::Order2 };
        let names = kind.names();
        let seed_name = if p.order == 1 { "w" } else { "v" };
        PairFile {
            kind,
            frame: Frame::Cartesian,
            dim: 1,
            order: p.a.order(),
            c: Some(p.c.clone()),
            d: p.d.clone(),
            b_z: None,
            v: p.v.to_text(&names),
            vt: p.vt.to_text(&names),
            a: op_terms(&p.a, &names),
            extras: extras([(seed_name, p.seed.to_text(&names))]),
            family: None,
        }
    }

    pub fn from_translational(p: &TranslationalPair<Q>) -> Self {
        let names = PairKind::Translational.names();
        PairFile {
            kind: PairKind::Translational,
            frame: Frame::Cartesian,
            dim: 3,
            order: 1,
            c: Some(p.c.clone()),
            d: None,
            b_z: None,
            v: p.v.to_text(&names),
            vt: p.vt.to_text(&names),
            a: op_terms(&p.a, &names),
            extras: extras([("w", p.w.to_text(&names)), ("V_yz", p.v_yz.to_text(&names))]),
            family: None,
        }
    }

    pub fn from_axial(p: &AxialPair<Q>) -> Self {
        let names = PairKind::Axial.names();
        PairFile {
            kind: PairKind::Axial,
            frame: Frame::Cylindrical,
            dim: 3,
            order: 1,
            c: None,
            d: None,
            b_z: None,
            v: p.v.to_text(&names),
            vt: p.vt.to_text(&names),
            a: op_terms(&p.a, &names),
            extras: extras([("w", p.w.to_text(&names)), ("V_rhoz", p.v_rhoz.to_text(&names))]),
            family: None,
        }
    }

    /// The potential is stored as a series in the screw angle `θ = φ − z/b_z`,
    /// written with the angle name `phi`.
    pub fn from_screw(s: &ScrewSystem<Q>) -> Self {
        let names = PairKind::Screw.names();
        let v = s.v.to_text(&names);
        PairFile {
            kind: PairKind::Screw,
            frame: Frame::Cylindrical,
            dim: 3,
            order: 1,
            c: None,
            d: None,
            b_z: Some(s.b_z.clone()),
            v: v.clone(),
            vt: v,
            a: op_terms(&s.a, &names),
            extras: extras([("angle", "phi in V stands for theta = phi - z/b_z".to_string())]),
            family: None,
        }
    }

    pub fn from_family(f: &Family3D<Q>) -> Self {
        let names = PairKind::Family.names();
        let t = |r: &R| r.to_text(&names);
        let components = extras([
            ("v1", t(&f.v[0])),
            ("v2", t(&f.v[1])),
            ("v3", t(&f.v[2])),
            ("w", t(&f.w)),
            ("beta_plus", t(&f.beta_plus)),
            ("beta_minus", t(&f.beta_minus)),
            ("beta_plus_prime", t(&f.beta_plus_prime)),
            ("beta_minus_prime", t(&f.beta_minus_prime)),
            ("alpha1", t(&f.alpha1)),
            ("alpha2", t(&f.alpha2)),
            ("gamma1", t(&f.gamma1)),
            ("gamma2", t(&f.gamma2)),
            ("V3", t(&f.v3_poly)),
        ]);
        PairFile {
            kind: PairKind::Family,
            frame: Frame::Cartesian,
            dim: 3,
            order: 2,
            c: Some(f.params.c.clone()),
            d: None,
            b_z: None,
            v: t(&f.pot),
            vt: t(&f.pot_t),
            a: op_terms(&f.a, &names),
            extras: BTreeMap::new(),
            family: Some(FamilySection { params: f.params.clone(), components, singular_lines: f.singular }),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("pair files always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidRequest(format!("malformed pair file: {}", e)))
    }

    fn rational(&self, text: &str) -> Result<R> {
        Ok(parse_rational_expr(text, self.kind.var_set())?)
    }

    fn trig(&self, text: &str) -> Result<TrigPoly<Q>> {
        Ok(parse_trig(text)?)
    }

    fn extra(&self, key: &str) -> Result<&str> {
        self.extras
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| Error::InvalidRequest(format!("pair file lacks '{}'", key)))
    }

    fn need<'a>(&self, v: &'a Option<Q>, key: &str) -> Result<&'a Q> {
        v.as_ref().ok_or_else(|| Error::InvalidRequest(format!("pair file lacks '{}'", key)))
    }

    fn check_frame(&self, expected: Frame) -> Result<()> {
        if self.frame != expected {
            return Err(Error::InvalidRequest(format!("{} pairs live in the {:?} frame", self.kind.name(), expected)));
        }
        Ok(())
    }

    fn rational_op(&self) -> Result<LinOp<R>> {
        let mut a = LinOp::zero(self.frame);
        for t in &self.a {
            a = &a + &LinOp::monomial(self.frame, t.alpha, self.rational(&t.coeff)?);
        }
        Ok(a)
    }

    fn trig_op(&self) -> Result<LinOp<TrigPoly<Q>>> {
        let mut a = LinOp::zero(self.frame);
        for t in &self.a {
            a = &a + &LinOp::monomial(self.frame, t.alpha, self.trig(&t.coeff)?);
        }
        Ok(a)
    }

    /// Every identity that applies to the kind, evaluated on the texts in
    /// the file.
    pub fn verify(&self) -> Result<CheckReport> {
        match self.kind {
            PairKind::Order1 | PairKind::Order2 => {
                self.check_frame(Frame::Cartesian)?;
                let order = if self.kind == PairKind::Order1 { 1 } else { 2 };
                let c = self.need(&self.c, "c")?;
                let d = if order == 2 { Some(self.need(&self.d, "d")?) } else { None };
                Ok(check_pair(order, &self.rational(&self.v)?, &self.rational(&self.vt)?, &self.rational_op()?, c, d))
            }
            PairKind::Translational => {
                self.check_frame(Frame::Cartesian)?;
                Ok(check_translational(
                    &self.rational_op()?,
                    &self.rational(&self.v)?,
                    &self.rational(&self.vt)?,
                    &self.rational(self.extra("w")?)?,
                    &self.rational(self.extra("V_yz")?)?,
                    self.need(&self.c, "c")?,
                ))
            }
            PairKind::Axial => {
                self.check_frame(Frame::Cylindrical)?;
                Ok(check_axial(
                    &self.trig_op()?,
                    &self.trig(&self.v)?,
                    &self.trig(&self.vt)?,
                    &self.trig(self.extra("w")?)?,
                    &self.rational(self.extra("V_rhoz")?)?,
                ))
            }
            PairKind::Screw => {
                self.check_frame(Frame::Cylindrical)?;
                let v = self.trig(&self.v)?;
                let report = check_screw(self.need(&self.b_z, "b_z")?, &v, &self.rational_op()?);
                let same = v == self.trig(&self.vt)?;
                let entry = crate::check::CheckEntry::new(
                    "file lists the same potential for both partners",
                    if same { "0".into() } else { format!("V − Ṽ = {}", (&v - &self.trig(&self.vt)?).to_text(&self.kind.names())) },
                    same,
                );
                Ok(report.merge(CheckReport::new(vec![entry])))
            }
            PairKind::Family => Ok(check_family(&self.family_from_file()?)),
        }
    }

    /// The family as written: parameters rebuild the bookkeeping, every
    /// function is taken from the file.
    pub fn family_from_file(&self) -> Result<Family3D<Q>> {
        self.check_frame(Frame::Cartesian)?;
        let sec = self.family.as_ref().ok_or_else(|| Error::InvalidRequest("pair file lacks the family section".into()))?;
        let mut f = build_family(&sec.params)?;
        let get = |key: &str| -> Result<R> {
            let text = sec.components.get(key).ok_or_else(|| Error::InvalidRequest(format!("family section lacks '{}'", key)))?;
            self.rational(text)
        };
        f.v = [get("v1")?, get("v2")?, get("v3")?];
        f.w = get("w")?;
        f.beta_plus = get("beta_plus")?;
        f.beta_minus = get("beta_minus")?;
        f.beta_plus_prime = get("beta_plus_prime")?;
        f.beta_minus_prime = get("beta_minus_prime")?;
        f.alpha1 = get("alpha1")?;
        f.alpha2 = get("alpha2")?;
        f.gamma1 = get("gamma1")?;
        f.gamma2 = get("gamma2")?;
        f.v3_poly = get("V3")?;
        f.pot = self.rational(&self.v)?;
        f.pot_t = self.rational(&self.vt)?;
        f.a = self.rational_op()?;
        Ok(f)
    }

    /// The Cartesian data the eigensolver needs.
    pub fn spectral_pair(&self) -> Result<SpectralPair<Q>> {
        match self.kind {
            PairKind::Axial | PairKind::Screw => Err(Error::InvalidRequest(format!(
                "numeric spectra are available for Cartesian pairs only, not {}",
                self.kind.name()
            ))),
            _ => {
                self.check_frame(Frame::Cartesian)?;
                SpectralPair::new(self.dim, self.rational(&self.v)?, self.rational(&self.vt)?, self.rational_op()?)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iso3d_first::{build_axial, build_screw, build_translational};
    use crate::susy1d::{build_order1, build_order2};
    use num_traits::Zero;

    fn round_trip(f: PairFile) -> PairFile {
        let back = PairFile::from_json(&f.to_json()).unwrap();
        assert_eq!(back, f);
        let report = back.verify().unwrap();
        assert!(report.overall, "{}: {:?}", f.kind.name(), report.first_failure());
        back
    }

    #[test]
    fn every_kind_round_trips_and_verifies() {
        let p1 = |s: &str| parse_rational_expr::<Q>(s, VarSet::Line).unwrap();
        let p3 = |s: &str| parse_rational_expr::<Q>(s, VarSet::Space).unwrap();
        let f = round_trip(PairFile::from_1d(&build_order1(&p1("x"), &Q::zero()).unwrap()));
        assert_eq!(f.v, "x^2 - 1");
        round_trip(PairFile::from_1d(&build_order2(&p1("2*x"), &Q::zero(), &Q::from(1)).unwrap()));
        round_trip(PairFile::from_translational(&build_translational(&p3("x"), &p3("y^2 + z^2"), &Q::zero()).unwrap()));
        round_trip(PairFile::from_axial(&build_axial(&parse_trig("sin(phi)").unwrap(), &parse_rational_expr("rho^2 + z^2", VarSet::Cylinder).unwrap()).unwrap()));
        round_trip(PairFile::from_screw(&build_screw(&Q::from(2), &parse_trig("rho^2 + cos(phi)").unwrap()).unwrap()));
        let mut fp = FamilyParams::with_c(Q::from(1));
        fp.q1 = Q::from(1);
        round_trip(PairFile::from_family(&build_family(&fp).unwrap()));
    }

    #[test]
    fn edited_potential_fails() {
        let p1 = |s: &str| parse_rational_expr::<Q>(s, VarSet::Line).unwrap();
        let mut f = PairFile::from_1d(&build_order1(&p1("x"), &Q::zero()).unwrap());
        f.v = "x^2".into();
        let r = f.verify().unwrap();
        assert!(!r.overall);
        assert_eq!(r.first_failure().unwrap().tag, "intertwining A H = H̃ A");

        let mut fam = PairFile::from_family(&build_family(&FamilyParams::with_c(Q::from(1))).unwrap());
        fam.v = format!("{} + x1", fam.v);
        let r = fam.verify().unwrap();
        assert!(!r.overall && !r.entries.last().unwrap().is_zero);
    }

    #[test]
    fn malformed_files() {
        assert!(PairFile::from_json("{\"kind\": \"1d-order1\"").is_err());
        let p1 = |s: &str| parse_rational_expr::<Q>(s, VarSet::Line).unwrap();
        let mut f = PairFile::from_1d(&build_order1(&p1("x"), &Q::zero()).unwrap());
        f.v = "x^^2".into();
        assert!(matches!(f.verify(), Err(Error::Expr(_))));
    }
}
