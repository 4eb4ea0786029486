//! Finite groups given by Cayley tables, and functions on them.

use crate::error::{Error, Result};
use crate::linalg::{C64, ONE, ZERO};
use serde::Deserialize;

#[derive(Clone, Debug, PartialEq)]
pub struct FiniteGroup {
    name: String,
    order: usize,
    identity: usize,
    table: Vec<usize>,
    inverses: Vec<usize>,
}

#[derive(Deserialize)]
struct TableFile {
    order: usize,
    identity: usize,
    table: Vec<usize>,
    #[serde(default)]
    name: Option<String>,
}

pub const BUILTIN: [&str; 11] = ["Z_2", "Z_3", "Z_4", "Z_5", "Z_6", "Z_7", "Z_8", "S_3", "S_4", "D_4", "Q_8"];

impl FiniteGroup {
    /// Validates a row-major Cayley table and builds the group.
    pub fn from_table(name: impl Into<String>, order: usize, identity: usize, table: Vec<usize>) -> Result<Self> {
        if order == 0 {
            return Err(Error::Group("order must be positive".into()));
        }
        if table.len() != order * order {
            return Err(Error::Group(format!(
                "table has {} entries, expected order² = {}",
                table.len(),
                order * order
            )));
        }
        if identity >= order {
            return Err(Error::Group(format!("identity index {identity} out of range")));
        }
        for (k, &v) in table.iter().enumerate() {
            if v >= order {
                return Err(Error::Group(format!("row {} has entry {v} out of range", k / order)));
            }
        }
        for r in 0..order {
            let mut seen = vec![false; order];
            for col in 0..order {
                let v = table[r * order + col];
                if seen[v] {
                    return Err(Error::Group(format!("row {r} repeats element {v}: not a Latin square")));
                }
                seen[v] = true;
            }
        }
        for col in 0..order {
            let mut seen = vec![false; order];
            for r in 0..order {
                let v = table[r * order + col];
                if seen[v] {
                    return Err(Error::Group(format!("column {col} repeats element {v}: not a Latin square")));
                }
                seen[v] = true;
            }
        }
        for g in 0..order {
            if table[identity * order + g] != g || table[g * order + identity] != g {
                return Err(Error::Group(format!("element {identity} is not a two-sided identity (fails at {g})")));
            }
        }
        let m = |a: usize, b: usize| table[a * order + b];
        for a in 0..order {
            for b in 0..order {
                let ab = m(a, b);
                for cc in 0..order {
                    if m(ab, cc) != m(a, m(b, cc)) {
                        return Err(Error::Group(format!("associativity fails for ({a}, {b}, {cc})")));
                    }
                }
            }
        }
        let mut inverses = vec![0; order];
        for g in 0..order {
            inverses[g] = (0..order)
                .find(|&h| m(g, h) == identity)
                .ok_or_else(|| Error::Group(format!("element {g} has no inverse")))?;
        }
        Ok(Self { name: name.into(), order, identity, table, inverses })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: TableFile = serde_json::from_str(text).map_err(|e| Error::Input(format!("group file: {e}")))?;
        Self::from_table(f.name.unwrap_or_else(|| "custom".into()), f.order, f.identity, f.table)
    }

    /// Built-in name or a path to a JSON table.
    pub fn load(source: &str) -> Result<Self> {
        if let Ok(g) = Self::builtin(source) {
            return Ok(g);
        }
        let path = std::path::Path::new(source);
        if path.exists() {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{source}: {e}")))?;
            return Self::from_json(&text);
        }
        Err(Error::Input(format!("unknown group `{source}`; built-ins are {}", BUILTIN.join(", "))))
    }

    pub fn builtin(name: &str) -> Result<Self> {
        let key: String = name.chars().filter(|c| *c != '_').collect::<String>().to_ascii_uppercase();
        match key.as_str() {
            "S3" => Ok(Self::symmetric(3)),
            "S4" => Ok(Self::symmetric(4)),
            "D4" => Ok(Self::dihedral4()),
            "Q8" => Ok(Self::quaternion()),
            k if k.starts_with('Z') => match k[1..].parse::<usize>() {
                Ok(n) if (1..=8).contains(&n) => Ok(Self::cyclic(n)),
                _ => Err(Error::Input(format!("unknown group `{name}`"))),
            },
            _ => Err(Error::Input(format!("unknown group `{name}`"))),
        }
    }

    pub fn all_builtin() -> Vec<Self> {
        BUILTIN.iter().map(|n| Self::builtin(n).expect("built-in")).collect()
    }

    pub fn cyclic(n: usize) -> Self {
        let table = (0..n * n).map(|k| (k / n + k % n) % n).collect();
        Self::from_table(format!("Z_{n}"), n, 0, table).expect("cyclic table")
    }

    pub fn symmetric(k: usize) -> Self {
        let mut perms = Vec::new();
        permutations(&mut (0..k).collect(), 0, &mut perms);
        perms.sort();
        Self::from_permutations(format!("S_{k}"), perms)
    }

    /// Symmetries of a square acting on its vertices.
    pub fn dihedral4() -> Self {
        let r = [1, 2, 3, 0];
        let s = [0, 3, 2, 1];
        let mut elems = Vec::new();
        let mut x: Vec<usize> = (0..4).collect();
        for _ in 0..4 {
            elems.push(x.clone());
            elems.push(compose(&x, &s));
            x = compose(&r, &x);
        }
        elems.sort();
        Self::from_permutations("D_4".into(), elems)
    }

    /// ±1, ±i, ±j, ±k under Hamilton's product.
    pub fn quaternion() -> Self {
        let units: Vec<[i32; 4]> = vec![
            [1, 0, 0, 0],
            [-1, 0, 0, 0],
            [0, 1, 0, 0],
            [0, -1, 0, 0],
            [0, 0, 1, 0],
            [0, 0, -1, 0],
            [0, 0, 0, 1],
            [0, 0, 0, -1],
        ];
        let ham = |a: &[i32; 4], b: &[i32; 4]| -> [i32; 4] {
            [
                a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
                a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
                a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
                a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
            ]
        };
        let table = (0..64)
            .map(|k| {
                let prod = ham(&units[k / 8], &units[k % 8]);
                units.iter().position(|u| *u == prod).expect("closed")
            })
            .collect();
        Self::from_table("Q_8", 8, 0, table).expect("quaternion table")
    }

    fn from_permutations(name: String, elems: Vec<Vec<usize>>) -> Self {
        let n = elems.len();
        let id: Vec<usize> = (0..elems[0].len()).collect();
        let identity = elems.iter().position(|e| *e == id).expect("identity present");
        let table = (0..n * n)
            .map(|k| {
                let prod = compose(&elems[k / n], &elems[k % n]);
                elems.iter().position(|e| *e == prod).expect("closed")
            })
            .collect();
        Self::from_table(name, n, identity, table).expect("permutation table")
    }

    /// Direct product with element (s, t) at index s·|H| + t.
    pub fn product(&self, other: &FiniteGroup) -> Self {
        let (n, m) = (self.order, other.order);
        let nm = n * m;
        let table = (0..nm * nm)
            .map(|k| {
                let (a, b) = (k / nm, k % nm);
                self.mul(a / m, b / m) * m + other.mul(a % m, b % m)
            })
            .collect();
        Self::from_table(
            format!("{}x{}", self.name, other.name),
            nm,
            self.identity * m + other.identity,
            table,
        )
        .expect("product of groups")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    /// Finite groups are unimodular.
    pub fn modular_function(&self, _s: usize) -> f64 {
        1.0
    }

    /// A pair that fails to commute, if any.
    pub fn noncommuting_pair(&self) -> Option<(usize, usize)> {
        (0..self.order)
            .flat_map(|a| (0..self.order).map(move |b| (a, b)))
            .find(|&(a, b)| self.mul(a, b) != self.mul(b, a))
    }

    pub fn is_abelian(&self) -> bool {
        self.noncommuting_pair().is_none()
    }

    /// All homomorphisms G → 𝕋, found by assigning roots of unity to a generating set.
    pub fn characters(&self) -> Vec<GroupFunction> {
        let n = self.order;
        let gens = self.generators();
        let mut out: Vec<GroupFunction> = Vec::new();
        let total = n.pow(gens.len() as u32);
        for code in 0..total {
            let mut k = code;
            let mut val: Vec<Option<C64>> = vec![None; n];
            val[self.identity] = Some(ONE);
            let mut frontier = vec![self.identity];
            let gen_vals: Vec<C64> = gens
                .iter()
                .map(|_| {
                    let e = k % n;
                    k /= n;
                    C64::from_polar(1.0, 2.0 * std::f64::consts::PI * e as f64 / n as f64)
                })
                .collect();
            while let Some(x) = frontier.pop() {
                for (g, gv) in gens.iter().zip(&gen_vals) {
                    let y = self.mul(x, *g);
                    if val[y].is_none() {
                        val[y] = Some(val[x].unwrap() * gv);
                        frontier.push(y);
                    }
                }
            }
            let values: Vec<C64> = val.into_iter().map(|v| v.unwrap_or(ZERO)).collect();
            let hom = (0..n).all(|a| (0..n).all(|b| (values[self.mul(a, b)] - values[a] * values[b]).norm() < 1e-9));
            if hom && !out.iter().any(|c| c.max_diff(&values) < 1e-9) {
                out.push(GroupFunction::new(values));
            }
        }
        out
    }

    fn generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut span = vec![false; self.order];
        span[self.identity] = true;
        for g in 0..self.order {
            if span[g] {
                continue;
            }
            gens.push(g);
            let mut elems: Vec<usize> = (0..self.order).filter(|&x| span[x]).collect();
            let mut i = 0;
            while i < elems.len() {
                for &h in &gens {
                    let y = self.mul(elems[i], h);
                    if !span[y] {
                        span[y] = true;
                        elems.push(y);
                    }
                }
                i += 1;
            }
        }
        gens
    }
}

fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().map(|&i| a[i]).collect()
}

fn permutations(v: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == v.len() {
        out.push(v.clone());
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permutations(v, k + 1, out);
        v.swap(k, i);
    }
}

/// A complex function on a finite group, indexed by element.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupFunction {
    pub values: Vec<C64>,
}

impl GroupFunction {
    pub fn new(values: Vec<C64>) -> Self {
        Self { values }
    }

    pub fn ones(g: &FiniteGroup) -> Self {
        Self::new(vec![ONE; g.order()])
    }

    pub fn delta(g: &FiniteGroup, s: usize) -> Self {
        let mut v = vec![ZERO; g.order()];
        v[s] = ONE;
        Self::new(v)
    }

    pub fn random(g: &FiniteGroup, rng: &mut rand_chacha::ChaCha8Rng) -> Self {
        Self::new((0..g.order()).map(|_| crate::linalg::gaussian(rng)).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// (s, t) ↦ u(s)·v(t) on G × H.
    pub fn tensor(&self, other: &GroupFunction) -> Self {
        Self::new(self.values.iter().flat_map(|a| other.values.iter().map(move |b| a * b)).collect())
    }

    pub fn pointwise(&self, other: &GroupFunction) -> Self {
        Self::new(self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.values.iter().map(|v| v * s).collect())
    }

    fn max_diff(&self, other: &[C64]) -> f64 {
        self.values.iter().zip(other).fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }
}
