//! Model distributions: Cartan distributions on jets of curves, Monge
//! systems, mixed jets, products with jets, and the geometric
//! prolongations of rank 2 and rank 3 distributions.
//!
//! Coordinates are named canonically: `x, y0..yk` for `J^k(R,R)`,
//! `x, y, y1.., z, z1..` for Monge systems, `w, w1..wl` for the appended
//! jet factor and `t`, `u`, `v` (made fresh when needed) for prolongations.

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::fieldalg::{self, q, Chart, FieldError, PointQ, Polynomial, VectorField, Q};
use crate::flag::{self, DerivedFlag, FlagError};
use crate::linalg;
use crate::modelio::{Model, ModelError};
use crate::par::Exec;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelsError {
    #[error("invalid parameters: {0}")]
    Parameters(String),
    #[error("missing marked role `{0}`")]
    MissingRole(String),
    #[error("frame must have {expected} fields, found {got}")]
    FrameRank { expected: usize, got: usize },
    #[error("base is not a Monge model")]
    NotMonge,
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Flag(#[from] FlagError),
}

pub type Result<T> = std::result::Result<T, ModelsError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Rank3Type {
    Ia,
    Ib,
    II,
}

impl std::str::FromStr for Rank3Type {
    type Err = ModelsError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ia" => Ok(Rank3Type::Ia),
            "ib" => Ok(Rank3Type::Ib),
            "ii" => Ok(Rank3Type::II),
            _ => Err(ModelsError::Parameters(format!("unknown prolongation type `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum JetKind {
    CartanJet { k: usize },
    MixedJet { m: usize, n: usize },
    Monge { m: usize, n: usize },
    Product { base: Box<JetKind>, l: usize },
    Prolonged { base: Box<JetKind>, ty: Rank3Type },
}

#[derive(Clone, Debug)]
pub struct JetModel {
    pub kind: JetKind,
    pub model: Model,
    pub notes: Vec<String>,
}

impl JetModel {
    pub fn frame(&self) -> Vec<VectorField> {
        self.model.frame()
    }

    pub fn chart(&self) -> &Chart {
        self.model.chart()
    }

    pub fn rank(&self) -> usize {
        self.model.distribution().len()
    }
}

/// A field together with a declared grade.
#[derive(Clone, Debug)]
pub struct GradedField {
    pub name: String,
    pub grade: i64,
    pub field: VectorField,
}

fn vf(chart: &Chart, terms: Vec<(usize, Polynomial)>) -> VectorField {
    let mut comps = vec![Polynomial::zero(chart); chart.len()];
    for (i, p) in terms {
        comps[i] = &comps[i] + &p;
    }
    VectorField::from_components(chart, comps).expect("components match chart")
}

fn named(chart: &Chart, base: &str) -> String {
    // field names must not collide with coordinates
    chart.fresh_name(base)
}

fn model_with_roles(
    name: String,
    chart: Chart,
    fields: Vec<(String, VectorField)>,
    roles: Vec<(&str, usize)>,
) -> Result<Model> {
    let dist = fields.iter().map(|(n, _)| n.clone()).collect();
    let marked = roles.into_iter().map(|(r, i)| (r.to_string(), fields[i].0.clone())).collect();
    Ok(Model::new(name, chart, fields, dist, marked, None)?)
}

/// Cartan distribution on `J^k(R,R)`:
/// `⟨∂_x + Σ_{i<k} y_{i+1} ∂_{y_i}, ∂_{y_k}⟩`.
pub fn cartan_jet(k: usize) -> Result<JetModel> {
    if k == 0 {
        return Err(ModelsError::Parameters("cartan_jet needs k >= 1".into()));
    }
    let mut names = vec!["x".to_string()];
    names.extend((0..=k).map(|i| format!("y{i}")));
    let chart = Chart::new(names)?;
    let mut d = vec![(0, Polynomial::one(&chart))];
    d.extend((0..k).map(|i| (1 + i, Polynomial::var(&chart, 2 + i))));
    let fields = vec![
        (named(&chart, "D"), vf(&chart, d)),
        (named(&chart, "V"), VectorField::basis(&chart, k + 1)),
    ];
    let model = model_with_roles(format!("cartan_jet_{k}"), chart, fields, vec![("V", 1)])?;
    Ok(JetModel { kind: JetKind::CartanJet { k }, model, notes: Vec::new() })
}

fn monge_chart(m: usize, n: usize) -> Result<Chart> {
    let mut names = vec!["x".to_string(), "y".to_string()];
    names.extend((1..m).map(|i| format!("y{i}")));
    names.push("z".into());
    names.extend((1..=n).map(|j| format!("z{j}")));
    Ok(Chart::new(names)?)
}

/// Monge system `y^(m) = (z^(n))^2` with frame `⟨D_x, ∂_{z_n}⟩`.
pub fn monge(m: usize, n: usize) -> Result<JetModel> {
    if m == 0 || n == 0 {
        return Err(ModelsError::Parameters("monge needs m, n >= 1".into()));
    }
    let chart = monge_chart(m, n)?;
    let zi = |j: usize| 1 + m + j;
    let mut d = vec![(0, Polynomial::one(&chart))];
    for i in 0..m - 1 {
        d.push((1 + i, Polynomial::var(&chart, 2 + i)));
    }
    d.push((m, Polynomial::var(&chart, zi(n)).pow(2)));
    for j in 0..n {
        d.push((zi(j), Polynomial::var(&chart, zi(j + 1))));
    }
    let fields = vec![
        (named(&chart, "Dx"), vf(&chart, d)),
        (named(&chart, "V"), VectorField::basis(&chart, zi(n))),
    ];
    let model = model_with_roles(format!("monge_{m}_{n}"), chart, fields, vec![("V", 1)])?;
    Ok(JetModel { kind: JetKind::Monge { m, n }, model, notes: Vec::new() })
}

/// `monge(1,3)` with its eleven symmetries, each tagged with its grade.
pub fn e13_with_symmetries() -> Result<(JetModel, Vec<GradedField>)> {
    let jm = monge(1, 3)?;
    let c = jm.chart().clone();
    let v = |i: usize| Polynomial::var(&c, i);
    let k = |a: i64, b: i64| Polynomial::constant(&c, q(a, b));
    let one = Polynomial::one(&c);
    // x y z z1 z2 z3
    let (x, y, z, z1, z2, z3) = (v(0), v(1), v(2), v(3), v(4), v(5));
    let (dx, dy, dz, dz1, dz2, dz3) = (0, 1, 2, 3, 4, 5);
    let xp = |e: u32, a: i64, b: i64| &x.pow(e) * &k(a, b);
    let f = |name: &str, grade: i64, terms: Vec<(usize, Polynomial)>| GradedField {
        name: name.into(),
        grade,
        field: vf(&c, terms),
    };
    let fields = vec![
        f("Z0", -4, vec![(dz, one.clone())]),
        f("Z1", -3, vec![(dz, x.clone()), (dz1, one.clone())]),
        f("Y0", -3, vec![(dy, one.clone())]),
        f("Z2", -2, vec![(dz, xp(2, 1, 2)), (dz1, x.clone()), (dz2, one.clone())]),
        f(
            "Z3",
            -1,
            vec![
                (dz, xp(3, 1, 6)),
                (dz1, xp(2, 1, 2)),
                (dz2, x.clone()),
                (dz3, one.clone()),
                (dy, &z2 * &k(2, 1)),
            ],
        ),
        f("S0", -1, vec![(dx, one.clone())]),
        f(
            "Z4",
            0,
            vec![
                (dz, xp(4, 1, 24)),
                (dz1, xp(3, 1, 6)),
                (dz2, xp(2, 1, 2)),
                (dz3, x.clone()),
                (dy, &(&(&x * &z2) - &z1) * &k(2, 1)),
            ],
        ),
        f(
            "S1",
            0,
            vec![
                (dx, x.clone()),
                (dz, &z * &k(5, 2)),
                (dz1, &z1 * &k(3, 2)),
                (dz2, &z2 * &k(1, 2)),
                (dz3, &z3 * &k(-1, 2)),
            ],
        ),
        f(
            "R",
            0,
            vec![
                (dy, y.clone()),
                (dz, &z * &k(1, 2)),
                (dz1, &z1 * &k(1, 2)),
                (dz2, &z2 * &k(1, 2)),
                (dz3, &z3 * &k(1, 2)),
            ],
        ),
        f(
            "Z5",
            1,
            vec![
                (dz, xp(5, 1, 120)),
                (dz1, xp(4, 1, 24)),
                (dz2, xp(3, 1, 6)),
                (dz3, xp(2, 1, 2)),
                (dy, &(&(&(&xp(2, 1, 2) * &z2) - &(&x * &z1)) + &z) * &k(2, 1)),
            ],
        ),
        f(
            "S2",
            1,
            vec![
                (dx, x.pow(2)),
                (dy, &z2.pow(2) * &k(9, 1)),
                (dz, &(&x * &z) * &k(5, 1)),
                (dz1, &(&z * &k(5, 1)) + &(&(&x * &z1) * &k(3, 1))),
                (dz2, &(&z1 * &k(8, 1)) + &(&x * &z2)),
                (dz3, &(&z2 * &k(9, 1)) - &(&x * &z3)),
            ],
        ),
    ];
    Ok((jm, fields))
}

/// Mixed jets `J^{m,n}(R,R^2)`: `⟨∂_x + Σ y_{i+1}∂_{y_i} + Σ z_{j+1}∂_{z_j}, ∂_{y_m}, ∂_{z_n}⟩`.
pub fn mixed_jet(m: usize, n: usize) -> Result<JetModel> {
    if m == 0 && n == 0 {
        return Err(ModelsError::Parameters("mixed_jet needs m + n >= 1".into()));
    }
    let mut names = vec!["x".to_string()];
    names.extend((0..=m).map(|i| format!("y{i}")));
    names.extend((0..=n).map(|j| format!("z{j}")));
    let chart = Chart::new(names)?;
    let yi = |i: usize| 1 + i;
    let zj = |j: usize| 2 + m + j;
    let mut d = vec![(0, Polynomial::one(&chart))];
    d.extend((0..m).map(|i| (yi(i), Polynomial::var(&chart, yi(i + 1)))));
    d.extend((0..n).map(|j| (zj(j), Polynomial::var(&chart, zj(j + 1)))));
    let fields = vec![
        (named(&chart, "D"), vf(&chart, d)),
        (named(&chart, "Vy"), VectorField::basis(&chart, yi(m))),
        (named(&chart, "Vz"), VectorField::basis(&chart, zj(n))),
    ];
    let model = model_with_roles(
        format!("mixed_jet_{m}_{n}"),
        chart,
        fields,
        vec![("X", 1), ("Y", 2), ("Z", 0)],
    )?;
    Ok(JetModel { kind: JetKind::MixedJet { m, n }, model, notes: Vec::new() })
}

/// Appends `w, w1..wl` to a Monge model, extends `D_x` by `Σ w_{j+1}∂_{w_j}`
/// and adds `∂_{w_l}` to the frame.
pub fn product_with_jets(base: &JetModel, l: usize) -> Result<JetModel> {
    if !matches!(base.kind, JetKind::Monge { .. }) {
        return Err(ModelsError::NotMonge);
    }
    if l == 0 {
        return Err(ModelsError::Parameters("product_with_jets needs l >= 1".into()));
    }
    let old = base.chart();
    let w0 = old.fresh_name("w");
    let mut extra = vec![w0.clone()];
    extra.extend((1..=l).map(|j| format!("{w0}{j}")));
    let chart = old.extended(extra)?;
    let off = old.len();
    let frame = base.frame();
    let mut dx = frame[0].embed(&chart).expect("chart extends base");
    let shift = vf(&chart, (0..l).map(|j| (off + j, Polynomial::var(&chart, off + j + 1))).collect());
    dx = dx.add(&shift);
    let vz = frame[1].embed(&chart).expect("chart extends base");
    let fields = vec![
        (base.model.distribution()[0].clone(), dx),
        (base.model.distribution()[1].clone(), vz),
        (named(&chart, "W"), VectorField::basis(&chart, off + l)),
    ];
    let name = format!("{}_w{l}", base.model.name());
    let model = model_with_roles(name, chart, fields, vec![("V", 1), ("W", 2)])?;
    Ok(JetModel {
        kind: JetKind::Product { base: Box::new(base.kind.clone()), l },
        model,
        notes: Vec::new(),
    })
}

/// The prolongation `Σ_{k≤l} D_x^k(f) ∂_{w_k}` of `f ∂_w` on a
/// [`product_with_jets`] model; `f` is a polynomial on its chart.
pub fn jet_prolonged_field(jm: &JetModel, f: &Polynomial) -> Result<VectorField> {
    let JetKind::Product { l, .. } = jm.kind else {
        return Err(ModelsError::Parameters("expected a product_with_jets model".into()));
    };
    let chart = jm.chart();
    let off = chart.len() - l - 1;
    let dx = &jm.frame()[0];
    let mut g = f.clone();
    let mut terms = Vec::with_capacity(l + 1);
    for kk in 0..=l {
        terms.push((off + kk, g.clone()));
        if kk < l {
            g = fieldalg::apply(dx, &g)?;
        }
    }
    Ok(vf(chart, terms))
}

/// `⟨∂_x, ∂_y⟩` on the plane with vertical section `V = ∂_y`.
pub fn trivial_rank2() -> Result<Model> {
    let chart = Chart::new(["x", "y"])?;
    let fields = vec![("U".to_string(), VectorField::basis(&chart, 0)), ("V".to_string(), VectorField::basis(&chart, 1))];
    model_with_roles("plane".into(), chart, fields, vec![("V", 1)])
}

/// `⟨∂_a, ∂_b, ∂_c⟩` with roles `X = ∂_a`, `Y = ∂_b`, `Z = ∂_c`.
pub fn trivial_rank3() -> Result<Model> {
    let chart = Chart::new(["a", "b", "c"])?;
    let fields = (0..3).map(|i| (["A", "B", "C"][i].to_string(), VectorField::basis(&chart, i))).collect();
    model_with_roles("space".into(), chart, fields, vec![("X", 0), ("Y", 1), ("Z", 2)])
}

fn role<'a>(base: &'a Model, r: &str) -> Result<&'a VectorField> {
    base.marked_field(r).map(|(_, f)| f).ok_or_else(|| ModelsError::MissingRole(r.into()))
}

/// Affine prolongation `⟨U + tV, ∂_t⟩` of a rank 2 frame `⟨U, V⟩` with
/// marked section `V`. The new vertical `∂_t` is marked `V`.
pub fn prolong_rank2(base: &Model) -> Result<Model> {
    let frame = base.frame();
    if frame.len() != 2 {
        return Err(ModelsError::FrameRank { expected: 2, got: frame.len() });
    }
    let (vname, v) = base.marked_field("V").ok_or_else(|| ModelsError::MissingRole("V".into()))?;
    let ui = if base.distribution()[0] == vname { 1 } else { 0 };
    let old = base.chart();
    let t = old.fresh_name("t");
    let chart = old.extended([t])?;
    let ti = chart.len() - 1;
    let u = frame[ui].embed(&chart).expect("chart extends base");
    let v = v.embed(&chart).expect("chart extends base");
    let fields = vec![
        (named(&chart, "U"), u.add(&v.scale_poly(&Polynomial::var(&chart, ti)))),
        (named(&chart, "V"), VectorField::basis(&chart, ti)),
    ];
    model_with_roles(format!("{}_p", base.name()), chart, fields, vec![("V", 1)])
}

/// Rank 3 prolongations:
/// `Ia: ⟨Y, ∂_t, Z + tX⟩`, `Ib: ⟨X, ∂_t, Z + tY⟩`, `II: ⟨∂_u, ∂_v, Z + uX + vY⟩`.
///
/// Roles on the result: `Ia` marks `X = ∂_t, Y = Y`; `Ib` marks
/// `X = X, Y = ∂_t`; `II` marks `X = ∂_u, Y = ∂_v`; `Z` is the third field.
pub fn prolong_rank3(base: &Model, ty: Rank3Type) -> Result<Model> {
    let frame = base.frame();
    if frame.len() != 3 {
        return Err(ModelsError::FrameRank { expected: 3, got: frame.len() });
    }
    let (x, y, z) = (role(base, "X")?, role(base, "Y")?, role(base, "Z")?);
    let old = base.chart();
    let new_names: Vec<String> = match ty {
        Rank3Type::Ia | Rank3Type::Ib => vec![old.fresh_name("t")],
        Rank3Type::II => {
            let u = old.fresh_name("u");
            let v = old.fresh_name("v");
            vec![u, v]
        }
    };
    let chart = old.extended(new_names)?;
    let e = |f: &VectorField| f.embed(&chart).expect("chart extends base");
    let (x, y, z) = (e(x), e(y), e(z));
    let n = chart.len();
    let fields = match ty {
        Rank3Type::Ia | Rank3Type::Ib => {
            let t = Polynomial::var(&chart, n - 1);
            let (keep, shifted) = if ty == Rank3Type::Ia { (y, x) } else { (x, y) };
            vec![keep, VectorField::basis(&chart, n - 1), z.add(&shifted.scale_poly(&t))]
        }
        Rank3Type::II => {
            let (u, v) = (Polynomial::var(&chart, n - 2), Polynomial::var(&chart, n - 1));
            vec![
                VectorField::basis(&chart, n - 2),
                VectorField::basis(&chart, n - 1),
                z.add(&x.scale_poly(&u)).add(&y.scale_poly(&v)),
            ]
        }
    };
    let fields: Vec<(String, VectorField)> =
        ["A", "B", "C"].iter().zip(fields).map(|(nm, f)| (named(&chart, nm), f)).collect();
    let roles = match ty {
        Rank3Type::Ia => vec![("X", 1), ("Y", 0), ("Z", 2)],
        Rank3Type::Ib => vec![("X", 0), ("Y", 1), ("Z", 2)],
        Rank3Type::II => vec![("X", 0), ("Y", 1), ("Z", 2)],
    };
    let suffix = match ty {
        Rank3Type::Ia => "ia",
        Rank3Type::Ib => "ib",
        Rank3Type::II => "ii",
    };
    model_with_roles(format!("{}_{suffix}", base.name()), chart, fields, roles)
}

/// True iff the weak growth vector at `p` is `(2,1,...,1)` with at least
/// one trailing 1 and the flag reaches the tangent space.
pub fn goursat_test(df: &DerivedFlag, p: &PointQ) -> Result<bool> {
    let fp = flag::flag_at(df, p)?;
    let g = &fp.growth;
    Ok(flag::is_bracket_generating(&fp) && g.len() >= 2 && g[0] == 2 && g[1..].iter().all(|&d| d == 1))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeprolongationWitness {
    /// A vector of `Δ(p)` in the Cauchy characteristic space of `Δ_2` at `p`.
    pub direction: Vec<Q>,
    /// `Δ_2(p)` is the whole tangent space, so every direction qualifies.
    pub length_two: bool,
}

/// Direction in `Δ(p)` that is a Cauchy characteristic of `Δ_2`, if any.
pub fn deprolongation_witness(df: &DerivedFlag, p: &PointQ, exec: Exec) -> Result<Option<DeprolongationWitness>> {
    if df.depth() < 2 {
        return Ok(None);
    }
    let n = df.chart().len();
    let cauchy = flag::cauchy_characteristic_space(df, 2, p, exec)?;
    let delta: Vec<Vec<Q>> = df.frame().iter().map(|f| fieldalg::evaluate(f, p)).collect::<fieldalg::Result<_>>()?;
    // a·C = b·Δ
    let cols: Vec<&Vec<Q>> = cauchy.iter().chain(delta.iter()).collect();
    let rows: Vec<Vec<Q>> = (0..n)
        .map(|r| {
            cols.iter()
                .enumerate()
                .map(|(j, c)| if j < cauchy.len() { c[r].clone() } else { -c[r].clone() })
                .collect()
        })
        .collect();
    let fp = flag::flag_at(df, p)?;
    let length_two = fp.dims.get(1).copied() == Some(n);
    for sol in linalg::nullspace(&rows, cols.len()) {
        let mut v = vec![Q::zero(); n];
        for (a, c) in sol.iter().zip(&cauchy) {
            for (vi, ci) in v.iter_mut().zip(c) {
                *vi += a * ci;
            }
        }
        if let Some(lead) = v.iter().find(|x| !x.is_zero()).cloned() {
            let direction = v.into_iter().map(|x| x / &lead).collect();
            return Ok(Some(DeprolongationWitness { direction, length_two }));
        }
    }
    Ok(None)
}

/// Model constructors reachable by name from the command line.
pub fn by_kind(kind: &str, params: &[usize]) -> Result<Model> {
    let arity = |k: usize| -> Result<()> {
        if params.len() == k {
            Ok(())
        } else {
            Err(ModelsError::Parameters(format!("`{kind}` takes {k} parameter(s), got {}", params.len())))
        }
    };
    let model = match kind {
        "cartan-jet" => {
            arity(1)?;
            cartan_jet(params[0])?.model
        }
        "monge" => {
            arity(2)?;
            monge(params[0], params[1])?.model
        }
        "e13" => {
            arity(0)?;
            let (jm, sym) = e13_with_symmetries()?;
            jm.model.with_extra_fields(sym.into_iter().map(|g| (g.name, g.field)).collect())?
        }
        "mixed-jet" => {
            arity(2)?;
            mixed_jet(params[0], params[1])?.model
        }
        "product" => {
            arity(3)?;
            product_with_jets(&monge(params[0], params[1])?, params[2])?.model
        }
        "goursat-chain" => {
            arity(1)?;
            let mut m = trivial_rank2()?;
            for _ in 0..params[0] {
                m = prolong_rank2(&m)?;
            }
            m
        }
        _ => return Err(ModelsError::Parameters(format!("unknown model kind `{kind}`"))),
    };
    Ok(model)
}

pub const KINDS: &[&str] = &["cartan-jet", "monge", "e13", "mixed-jet", "product", "goursat-chain"];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldalg::qi;
    use crate::flag::{derived_flag, flag_at};
    use crate::modelio::{parse_model, print_model};
    use crate::symcheck::is_symmetry;

    fn growth(m: &Model) -> Vec<usize> {
        let df = derived_flag(&m.frame(), 16).unwrap();
        flag_at(&df, &PointQ::origin(m.chart())).unwrap().growth
    }

    #[test]
    fn cartan_and_monge_growth() {
        assert_eq!(growth(&cartan_jet(1).unwrap().model), vec![2, 1]);
        assert_eq!(growth(&cartan_jet(3).unwrap().model), vec![2, 1, 1, 1]);
        assert_eq!(growth(&monge(1, 3).unwrap().model), vec![2, 1, 2, 1]);
        // x, y, z, z1
        assert_eq!(monge(1, 1).unwrap().chart().len(), 4);
        assert_eq!(growth(&monge(1, 1).unwrap().model), vec![2, 1, 1]);
        assert_eq!(growth(&mixed_jet(1, 2).unwrap().model), vec![3, 2, 1]);
        assert!(cartan_jet(0).is_err());
    }

    #[test]
    fn e13_fields_are_symmetries() {
        let (jm, sym) = e13_with_symmetries().unwrap();
        let frame = jm.frame();
        let mut counts = [0usize; 6];
        for g in &sym {
            assert!(is_symmetry(&g.field, &frame).unwrap(), "{}", g.name);
            counts[(g.grade + 4) as usize] += 1;
        }
        assert_eq!(counts, [1, 2, 1, 2, 3, 2]);
        assert_eq!(sym.iter().find(|g| g.name == "Z3").unwrap().grade, -1);
    }

    #[test]
    fn product_family() {
        let jm = product_with_jets(&monge(1, 3).unwrap(), 2).unwrap();
        assert_eq!(jm.rank(), 3);
        let w = jm.chart().index_of("w").unwrap();
        let wv = Polynomial::var(jm.chart(), w);
        let f = jet_prolonged_field(&jm, &wv.pow(2)).unwrap();
        // w^2 ∂w + 2 w w1 ∂w1 + (2 w w2 + 2 w1^2) ∂w2
        let w1 = Polynomial::var(jm.chart(), w + 1);
        let w2 = Polynomial::var(jm.chart(), w + 2);
        let two = Polynomial::constant(jm.chart(), qi(2));
        assert_eq!(f.component(w + 1), &(&(&wv * &w1) * &two));
        assert_eq!(f.component(w + 2), &(&(&(&wv * &w2) * &two) + &(&w1.pow(2) * &two)));
        assert!(is_symmetry(&f, &jm.frame()).unwrap());
    }

    #[test]
    fn prolongations() {
        let mut m = trivial_rank2().unwrap();
        for k in 1..=4 {
            m = prolong_rank2(&m).unwrap();
            let mut want = vec![2];
            want.extend(std::iter::repeat_n(1, k));
            assert_eq!(growth(&m), want);
        }
        let ii = prolong_rank3(&trivial_rank3().unwrap(), Rank3Type::II).unwrap();
        assert_eq!(growth(&ii), vec![3, 2]);
        let ii2 = prolong_rank3(&ii, Rank3Type::II).unwrap();
        assert_eq!(growth(&ii2), growth(&mixed_jet(2, 2).unwrap().model));
        let ia = prolong_rank3(&trivial_rank3().unwrap(), Rank3Type::Ia).unwrap();
        assert_eq!((ia.frame().len(), ia.chart().len()), (3, 4));
        let no_roles = Model::from_frame("m", Chart::new(["x"]).unwrap(), vec![("U".into(), VectorField::basis(&Chart::new(["x"]).unwrap(), 0))]).unwrap();
        assert!(matches!(prolong_rank2(&no_roles), Err(ModelsError::FrameRank { .. })));
    }

    #[test]
    fn goursat_and_deprolongation() {
        let c3 = cartan_jet(3).unwrap();
        let df = derived_flag(&c3.frame(), 16).unwrap();
        let o = PointQ::origin(c3.chart());
        assert!(goursat_test(&df, &o).unwrap());
        let w = deprolongation_witness(&df, &o, Exec::Sequential).unwrap().unwrap();
        assert_eq!(w.direction, VectorField::basis(c3.chart(), 4).components().iter().map(|p| p.constant_term()).collect::<Vec<_>>());
        assert!(!w.length_two);
        let e = monge(1, 3).unwrap();
        let df = derived_flag(&e.frame(), 16).unwrap();
        let o = PointQ::origin(e.chart());
        assert!(!goursat_test(&df, &o).unwrap());
        assert!(deprolongation_witness(&df, &o, Exec::Sequential).unwrap().is_none());
        let c1 = cartan_jet(1).unwrap();
        let df = derived_flag(&c1.frame(), 16).unwrap();
        let w = deprolongation_witness(&df, &PointQ::origin(c1.chart()), Exec::Sequential).unwrap().unwrap();
        assert!(w.length_two);
    }

    #[test]
    fn print_parse_round_trip() {
        for kind in KINDS {
            let params: &[usize] = match *kind {
                "cartan-jet" | "goursat-chain" => &[3],
                "e13" => &[],
                "product" => &[1, 3, 2],
                _ => &[1, 2],
            };
            let m = by_kind(kind, params).unwrap();
            assert_eq!(parse_model(&print_model(&m)).unwrap(), m, "{kind}");
        }
        let ii = prolong_rank3(&trivial_rank3().unwrap(), Rank3Type::Ib).unwrap();
        assert_eq!(parse_model(&print_model(&ii)).unwrap(), ii);
    }
}
