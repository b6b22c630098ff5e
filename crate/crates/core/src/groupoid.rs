//! Finite groupoids: the table model, axiom validation and the constructors
//! for groups, spaces, pair groupoids, transformation groupoids, products and
//! disjoint unions.
//!
//! Arrows are dense indices `0..n`. Units are a subset of the arrows; the
//! range and source maps return *unit positions* (indices into [`Groupoid::units`])
//! so that measures on the unit space are plain vectors.

use std::cell::Cell;
use std::fmt;

use crate::error::{Error, Result};

/// Default upper bound on the number of arrows.
pub const DEFAULT_SIZE_CAP: usize = 256;

thread_local! {
    static SIZE_CAP: Cell<Option<usize>> = const { Cell::new(None) };
}

/// The arrow cap in force on this thread: a scoped override, else the
/// `GROUPOIDAL_SIZE_CAP` environment variable, else [`DEFAULT_SIZE_CAP`].
pub fn size_cap() -> usize {
    SIZE_CAP.with(|c| c.get()).unwrap_or_else(|| {
        std::env::var("GROUPOIDAL_SIZE_CAP")
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(DEFAULT_SIZE_CAP)
    })
}

/// Run `f` with a different arrow cap on the current thread.
pub fn with_size_cap<T>(cap: usize, f: impl FnOnce() -> T) -> T {
    let prev = SIZE_CAP.with(|c| c.replace(Some(cap)));
    let out = f();
    SIZE_CAP.with(|c| c.set(prev));
    out
}

fn check_cap(arrows: usize) -> Result<()> {
    let cap = size_cap();
    if arrows > cap {
        return Err(Error::SizeCapExceeded { arrows, cap });
    }
    Ok(())
}

/// A violated groupoid axiom together with the arrows that witness it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub axiom: &'static str,
    pub witnesses: Vec<usize>,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} violated at arrows {:?}", self.axiom, self.witnesses)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Groupoid {
    labels: Vec<String>,
    units: Vec<usize>,
    unit_pos: Vec<Option<usize>>,
    range: Vec<usize>,
    source: Vec<usize>,
    inverse: Vec<usize>,
    compose: Vec<Option<usize>>,
    range_fibers: Vec<Vec<usize>>,
    source_fibers: Vec<Vec<usize>>,
}

impl Groupoid {
    /// Assemble a groupoid from explicit tables.
    ///
    /// `range` and `source` map arrows to *arrow ids* of units. Structural
    /// consistency (sizes, index bounds, units are fixed by `r` and `s`) is
    /// enforced here; the algebraic axioms are left to [`Groupoid::validate`].
    pub fn from_tables(
        labels: Vec<String>,
        units: Vec<usize>,
        range: Vec<usize>,
        source: Vec<usize>,
        inverse: Vec<usize>,
        compose: Vec<Option<usize>>,
    ) -> Result<Self> {
        let n = labels.len();
        check_cap(n)?;
        if n == 0 {
            return Err(Error::InvalidGroupoid("no arrows".into()));
        }
        if range.len() != n || source.len() != n || inverse.len() != n || compose.len() != n * n {
            return Err(Error::InvalidGroupoid("table sizes do not match the arrow count".into()));
        }
        let mut unit_pos = vec![None; n];
        for (k, &u) in units.iter().enumerate() {
            if u >= n || unit_pos[u].is_some() {
                return Err(Error::InvalidGroupoid(format!("bad or repeated unit {u}")));
            }
            unit_pos[u] = Some(k);
        }
        let to_pos = |arrow: usize, what: &str| -> Result<usize> {
            if arrow >= n {
                return Err(Error::InvalidGroupoid(format!("{what} value {arrow} out of bounds")));
            }
            unit_pos[arrow].ok_or_else(|| Error::InvalidGroupoid(format!("{what} value {arrow} is not a unit")))
        };
        let range = range.iter().map(|&a| to_pos(a, "range")).collect::<Result<Vec<_>>>()?;
        let source = source.iter().map(|&a| to_pos(a, "source")).collect::<Result<Vec<_>>>()?;
        if inverse.iter().any(|&a| a >= n) || compose.iter().flatten().any(|&a| a >= n) {
            return Err(Error::InvalidGroupoid("inverse or composition value out of bounds".into()));
        }
        let mut range_fibers = vec![Vec::new(); units.len()];
        let mut source_fibers = vec![Vec::new(); units.len()];
        for g in 0..n {
            range_fibers[range[g]].push(g);
            source_fibers[source[g]].push(g);
        }
        Ok(Groupoid {
            labels,
            units,
            unit_pos,
            range,
            source,
            inverse,
            compose,
            range_fibers,
            source_fibers,
        })
    }

    pub fn n_arrows(&self) -> usize {
        self.labels.len()
    }

    pub fn n_units(&self) -> usize {
        self.units.len()
    }

    /// Arrow ids of the units, in unit order.
    pub fn units(&self) -> &[usize] {
        &self.units
    }

    pub fn unit_arrow(&self, x: usize) -> usize {
        self.units[x]
    }

    /// Position of an arrow among the units, if it is one.
    pub fn unit_position(&self, g: usize) -> Option<usize> {
        self.unit_pos[g]
    }

    pub fn is_unit(&self, g: usize) -> bool {
        self.unit_pos[g].is_some()
    }

    pub fn label(&self, g: usize) -> &str {
        &self.labels[g]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// `r(γ)` as a unit position.
    pub fn range(&self, g: usize) -> usize {
        self.range[g]
    }

    /// `s(γ)` as a unit position.
    pub fn source(&self, g: usize) -> usize {
        self.source[g]
    }

    pub fn inverse(&self, g: usize) -> usize {
        self.inverse[g]
    }

    pub fn inverse_table(&self) -> &[usize] {
        &self.inverse
    }

    /// `γη`, defined when `s(γ) = r(η)`.
    pub fn compose(&self, g: usize, h: usize) -> Option<usize> {
        self.compose[g * self.n_arrows() + h]
    }

    /// `G^x = r⁻¹(x)` for a unit position `x`.
    pub fn range_fiber(&self, x: usize) -> &[usize] {
        &self.range_fibers[x]
    }

    /// `G_x = s⁻¹(x)` for a unit position `x`.
    pub fn source_fiber(&self, x: usize) -> &[usize] {
        &self.source_fibers[x]
    }

    /// The source partition `{G_x}`, in unit order.
    pub fn source_fibers(&self) -> &[Vec<usize>] {
        &self.source_fibers
    }

    /// `(G^x, G_x)` for the unit arrow `x`.
    pub fn fibers(&self, x: usize) -> Result<(Vec<usize>, Vec<usize>)> {
        let pos = self.unit_pos.get(x).copied().flatten().ok_or(Error::NotAUnit(x))?;
        Ok((self.range_fibers[pos].clone(), self.source_fibers[pos].clone()))
    }

    /// All composable pairs `(γ, η)` with their product.
    pub fn composable_pairs(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let n = self.n_arrows();
        (0..n).flat_map(move |g| {
            self.range_fiber(self.source(g))
                .iter()
                .map(move |&h| (g, h, self.compose(g, h).unwrap_or(usize::MAX)))
        })
    }

    /// Exhaustive axiom check. Empty iff `self` is a groupoid.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let n = self.n_arrows();
        let mut out = Vec::new();
        let mut push = |axiom: &'static str, witnesses: Vec<usize>| out.push(Diagnostic { axiom, witnesses });

        for (k, &x) in self.units.iter().enumerate() {
            if self.range[x] != k || self.source[x] != k {
                push("units are fixed by range and source", vec![x]);
            }
        }
        for g in 0..n {
            let (r, s) = (self.units[self.range[g]], self.units[self.source[g]]);
            if self.compose(g, s) != Some(g) {
                push("right unit law", vec![g, s]);
            }
            if self.compose(r, g) != Some(g) {
                push("left unit law", vec![r, g]);
            }
            let gi = self.inverse[g];
            if self.inverse[gi] != g {
                push("inverse is an involution", vec![g]);
            }
            if self.range[gi] != self.source[g] || self.source[gi] != self.range[g] {
                push("inverse swaps range and source", vec![g]);
            }
            if self.compose(g, gi) != Some(r) {
                push("γγ⁻¹ = r(γ)", vec![g]);
            }
            if self.compose(gi, g) != Some(s) {
                push("γ⁻¹γ = s(γ)", vec![g]);
            }
        }
        for g in 0..n {
            for h in 0..n {
                let composable = self.source[g] == self.range[h];
                match (composable, self.compose(g, h)) {
                    (true, None) => push("composable pairs compose", vec![g, h]),
                    (false, Some(_)) => push("only composable pairs compose", vec![g, h]),
                    (true, Some(gh)) => {
                        if self.range[gh] != self.range[g] || self.source[gh] != self.source[h] {
                            push("range and source of a product", vec![g, h]);
                        }
                    }
                    (false, None) => {}
                }
            }
        }
        for g in 0..n {
            for &h in self.range_fiber(self.source[g]) {
                let Some(gh) = self.compose(g, h) else { continue };
                for &k in self.range_fiber(self.source[h]) {
                    let lhs = self.compose(gh, k);
                    let rhs = self.compose(h, k).and_then(|hk| self.compose(g, hk));
                    if lhs != rhs || lhs.is_none() {
                        push("associativity", vec![g, h, k]);
                    }
                }
            }
        }
        out
    }

    /// A group from its multiplication table `table[a][b] = ab`.
    pub fn from_group(table: &[Vec<usize>]) -> Result<Self> {
        let n = table.len();
        check_group(table)?;
        let e = (0..n).find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a)).expect("checked");
        let inverse = (0..n).map(|a| (0..n).find(|&b| table[a][b] == e).expect("checked")).collect();
        let compose = (0..n).flat_map(|a| (0..n).map(move |b| Some(table[a][b]))).collect();
        let labels = (0..n).map(|a| format!("g{a}")).collect();
        Self::from_tables(labels, vec![e], vec![e; n], vec![e; n], inverse, compose)
    }

    /// `Z/n`.
    pub fn cyclic(n: usize) -> Result<Self> {
        Self::from_group(&cyclic_table(n))
    }

    /// A space with `n` points: only units.
    pub fn space(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGroupoid("empty space".into()));
        }
        let mut compose = vec![None; n * n];
        for x in 0..n {
            compose[x * n + x] = Some(x);
        }
        Self::from_tables(
            (0..n).map(|x| format!("x{x}")).collect(),
            (0..n).collect(),
            (0..n).collect(),
            (0..n).collect(),
            (0..n).collect(),
            compose,
        )
    }

    /// The pair groupoid `X × X` on `n` points; arrow `(x, y)` has index `x·n + y`.
    pub fn pair(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGroupoid("pair groupoid needs n ≥ 1".into()));
        }
        let m = n * n;
        check_cap(m)?;
        let id = |x: usize, y: usize| x * n + y;
        let mut compose = vec![None; m * m];
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    compose[id(x, y) * m + id(y, z)] = Some(id(x, z));
                }
            }
        }
        let mut labels = Vec::with_capacity(m);
        let (mut range, mut source, mut inverse) = (Vec::new(), Vec::new(), Vec::new());
        for x in 0..n {
            for y in 0..n {
                labels.push(format!("({},{})", x + 1, y + 1));
                range.push(id(x, x));
                source.push(id(y, y));
                inverse.push(id(y, x));
            }
        }
        Self::from_tables(labels, (0..n).map(|x| id(x, x)).collect(), range, source, inverse, compose)
    }

    /// The transformation groupoid of a right action `action[x][g] = x·g` of
    /// the group `table` on `points` points. Arrow `(x, g)` has index `x·|G| + g`.
    pub fn from_action(table: &[Vec<usize>], points: usize, action: &[Vec<usize>]) -> Result<Self> {
        check_group(table).map_err(|e| Error::NotAnAction(e.to_string()))?;
        let k = table.len();
        if action.len() != points || action.iter().any(|row| row.len() != k || row.iter().any(|&y| y >= points)) {
            return Err(Error::NotAnAction("action table has the wrong shape".into()));
        }
        let e = (0..k).find(|&e| (0..k).all(|a| table[e][a] == a)).expect("checked");
        for x in 0..points {
            if action[x][e] != x {
                return Err(Error::NotAnAction(format!("identity moves point {x}")));
            }
            for g in 0..k {
                for h in 0..k {
                    if action[action[x][g]][h] != action[x][table[g][h]] {
                        return Err(Error::NotAnAction(format!("(x·g)·h ≠ x·(gh) at x={x}, g={g}, h={h}")));
                    }
                }
            }
        }
        let m = points * k;
        check_cap(m)?;
        let id = |x: usize, g: usize| x * k + g;
        let ginv: Vec<usize> = (0..k).map(|a| (0..k).find(|&b| table[a][b] == e).expect("checked")).collect();
        let mut compose = vec![None; m * m];
        let (mut labels, mut range, mut source, mut inverse) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for x in 0..points {
            for g in 0..k {
                let y = action[x][g];
                labels.push(format!("(x{x},g{g})"));
                range.push(id(x, e));
                source.push(id(y, e));
                inverse.push(id(y, ginv[g]));
                for h in 0..k {
                    compose[id(x, g) * m + id(y, h)] = Some(id(x, table[g][h]));
                }
            }
        }
        Self::from_tables(labels, (0..points).map(|x| id(x, e)).collect(), range, source, inverse, compose)
    }

    /// `G₁ × G₂`; arrow `(γ₁, γ₂)` has index `γ₁·|G₂| + γ₂` and unit
    /// position `x₁·|X₂| + x₂`.
    pub fn product(a: &Groupoid, b: &Groupoid) -> Result<Self> {
        let (na, nb) = (a.n_arrows(), b.n_arrows());
        let m = na * nb;
        check_cap(m)?;
        let id = |g: usize, h: usize| g * nb + h;
        let mut labels = Vec::with_capacity(m);
        let (mut range, mut source, mut inverse) = (Vec::new(), Vec::new(), Vec::new());
        let mut compose = vec![None; m * m];
        for g in 0..na {
            for h in 0..nb {
                labels.push(format!("{}×{}", a.label(g), b.label(h)));
                range.push(id(a.unit_arrow(a.range(g)), b.unit_arrow(b.range(h))));
                source.push(id(a.unit_arrow(a.source(g)), b.unit_arrow(b.source(h))));
                inverse.push(id(a.inverse(g), b.inverse(h)));
            }
        }
        for g1 in 0..na {
            for g2 in 0..na {
                let Some(g) = a.compose(g1, g2) else { continue };
                for h1 in 0..nb {
                    for h2 in 0..nb {
                        if let Some(h) = b.compose(h1, h2) {
                            compose[id(g1, h1) * m + id(g2, h2)] = Some(id(g, h));
                        }
                    }
                }
            }
        }
        let units = a.units.iter().flat_map(|&x| b.units.iter().map(move |&y| id(x, y))).collect();
        Self::from_tables(labels, units, range, source, inverse, compose)
    }

    /// `G₁ ⊔ G₂`: the arrows of `a` followed by those of `b`.
    pub fn disjoint_union(a: &Groupoid, b: &Groupoid) -> Result<Self> {
        let (na, nb) = (a.n_arrows(), b.n_arrows());
        let m = na + nb;
        check_cap(m)?;
        let mut compose = vec![None; m * m];
        for g in 0..na {
            for h in 0..na {
                compose[g * m + h] = a.compose(g, h);
            }
        }
        for g in 0..nb {
            for h in 0..nb {
                compose[(na + g) * m + na + h] = b.compose(g, h).map(|k| k + na);
            }
        }
        let labels = a
            .labels
            .iter()
            .map(|l| format!("L:{l}"))
            .chain(b.labels.iter().map(|l| format!("R:{l}")))
            .collect();
        let units = a.units.iter().copied().chain(b.units.iter().map(|&u| u + na)).collect();
        let range = (0..na)
            .map(|g| a.unit_arrow(a.range(g)))
            .chain((0..nb).map(|g| na + b.unit_arrow(b.range(g))))
            .collect();
        let source = (0..na)
            .map(|g| a.unit_arrow(a.source(g)))
            .chain((0..nb).map(|g| na + b.unit_arrow(b.source(g))))
            .collect();
        let inverse = a.inverse.iter().copied().chain(b.inverse.iter().map(|&g| g + na)).collect();
        Self::from_tables(labels, units, range, source, inverse, compose)
    }

    /// Search for a bijection of arrows carrying `self`'s composition,
    /// inverse and units onto `other`'s. Backtracking; meant for small tables.
    pub fn isomorphism_to(&self, other: &Groupoid) -> Option<Vec<usize>> {
        let n = self.n_arrows();
        if n != other.n_arrows() || self.n_units() != other.n_units() {
            return None;
        }
        type Signature = dyn Fn(&Groupoid, usize) -> (bool, usize, usize, bool);
        let signature = |g: &Groupoid, a: usize| {
            (
                g.is_unit(a),
                g.range_fiber(g.range(a)).len(),
                g.source_fiber(g.source(a)).len(),
                g.inverse(a) == a,
            )
        };
        let mut map = vec![usize::MAX; n];
        let mut used = vec![false; n];
        fn consistent(s: &Groupoid, o: &Groupoid, map: &[usize], a: usize) -> bool {
            let n = s.n_arrows();
            let ia = s.inverse(a);
            if map[ia] != usize::MAX && map[ia] != o.inverse(map[a]) {
                return false;
            }
            for b in 0..n {
                if map[b] == usize::MAX {
                    continue;
                }
                for (x, y) in [(a, b), (b, a)] {
                    let lhs = s.compose(x, y);
                    let rhs = o.compose(map[x], map[y]);
                    match (lhs, rhs) {
                        (None, None) => {}
                        (Some(xy), Some(img)) => {
                            if map[xy] != usize::MAX && map[xy] != img {
                                return false;
                            }
                        }
                        _ => return false,
                    }
                }
            }
            true
        }
        fn go(s: &Groupoid, o: &Groupoid, a: usize, map: &mut Vec<usize>, used: &mut Vec<bool>, sig: &Signature) -> bool {
            let n = s.n_arrows();
            if a == n {
                return true;
            }
            for b in 0..n {
                if used[b] || sig(s, a) != sig(o, b) {
                    continue;
                }
                map[a] = b;
                used[b] = true;
                if consistent(s, o, map, a) && go(s, o, a + 1, map, used, sig) {
                    return true;
                }
                map[a] = usize::MAX;
                used[b] = false;
            }
            false
        }
        if go(self, other, 0, &mut map, &mut used, &signature) {
            Some(map)
        } else {
            None
        }
    }
}

fn check_group(table: &[Vec<usize>]) -> Result<()> {
    let n = table.len();
    if n == 0 {
        return Err(Error::NotAGroup("empty table".into()));
    }
    if table.iter().any(|row| row.len() != n || row.iter().any(|&v| v >= n)) {
        return Err(Error::NotAGroup("table is not closed or not square".into()));
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if table[table[a][b]][c] != table[a][table[b][c]] {
                    return Err(Error::NotAGroup(format!("associativity fails at ({a},{b},{c})")));
                }
            }
        }
    }
    let e = (0..n)
        .find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a))
        .ok_or_else(|| Error::NotAGroup("no identity element".into()))?;
    for (a, row) in table.iter().enumerate() {
        if !(0..n).any(|b| row[b] == e && table[b][a] == e) {
            return Err(Error::NotAGroup(format!("element {a} has no inverse")));
        }
    }
    Ok(())
}

pub fn cyclic_table(n: usize) -> Vec<Vec<usize>> {
    (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect()
}

/// Multiplication table of `S_n` acting on the right: `(σ·τ)(i) = τ(σ(i))`.
pub fn symmetric_table(n: usize) -> Vec<Vec<usize>> {
    let perms = permutations(n);
    let index = |p: &Vec<usize>| perms.iter().position(|q| q == p).expect("closed");
    perms
        .iter()
        .map(|s| perms.iter().map(|t| index(&s.iter().map(|&i| t[i]).collect())).collect())
        .collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// Direct product of two group tables, element `(a, b)` at index `a·|B| + b`.
pub fn product_table(a: &[Vec<usize>], b: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let nb = b.len();
    let n = a.len() * nb;
    (0..n).map(|x| (0..n).map(|y| a[x / nb][y / nb] * nb + b[x % nb][y % nb]).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructor_outputs_validate() {
        let gs = [
            Groupoid::pair(1).unwrap(),
            Groupoid::pair(2).unwrap(),
            Groupoid::pair(3).unwrap(),
            Groupoid::cyclic(4).unwrap(),
            Groupoid::from_group(&symmetric_table(3)).unwrap(),
            Groupoid::space(3).unwrap(),
        ];
        for g in &gs {
            assert!(g.validate().is_empty(), "{:?}", g.validate());
        }
    }

    #[test]
    fn counts() {
        let z2 = Groupoid::cyclic(2).unwrap();
        assert_eq!((z2.n_arrows(), z2.n_units()), (2, 1));
        let s3 = Groupoid::from_group(&symmetric_table(3)).unwrap();
        assert_eq!((s3.n_arrows(), s3.n_units()), (6, 1));
        let p2 = Groupoid::pair(2).unwrap();
        assert_eq!((p2.n_arrows(), p2.n_units()), (4, 2));
        let p1 = Groupoid::pair(1).unwrap();
        assert_eq!((p1.n_arrows(), p1.n_units()), (1, 1));
        assert!(p1.is_unit(0));
        assert_eq!(Groupoid::pair(3).unwrap().n_arrows(), 9);
    }

    #[test]
    fn non_group_tables_rejected() {
        // x*y = x - y mod 3 is not associative
        let t: Vec<Vec<usize>> = (0..3).map(|a| (0..3).map(|b| (a + 3 - b) % 3).collect()).collect();
        assert!(matches!(Groupoid::from_group(&t), Err(Error::NotAGroup(_))));
    }

    #[test]
    fn broken_associativity_is_diagnosed() {
        // Z/3 with one product entry flipped
        let g = Groupoid::cyclic(3).unwrap();
        let mut compose = g.compose.clone();
        compose[3 + 1] = Some(0); // 1·1 := 0 instead of 2
        let bad = Groupoid::from_tables(g.labels.clone(), vec![0], vec![0; 3], vec![0; 3], g.inverse.clone(), compose).unwrap();
        let diags = bad.validate();
        assert!(diags.iter().any(|d| d.axiom == "associativity"));
    }

    #[test]
    fn swap_action_is_the_pair_groupoid() {
        let swap = vec![vec![0, 1], vec![1, 0]];
        let g = Groupoid::from_action(&cyclic_table(2), 2, &swap).unwrap();
        assert_eq!((g.n_arrows(), g.n_units()), (4, 2));
        assert!(g.validate().is_empty());
        let p = Groupoid::pair(2).unwrap();
        let iso = g.isomorphism_to(&p).expect("isomorphic");
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(g.compose(a, b).map(|c| iso[c]), p.compose(iso[a], iso[b]));
            }
        }
    }

    #[test]
    fn trivial_action_is_a_group_bundle() {
        let triv = vec![vec![0, 0], vec![1, 1]];
        let g = Groupoid::from_action(&cyclic_table(2), 2, &triv).unwrap();
        assert_eq!((g.n_arrows(), g.n_units()), (4, 2));
        assert!((0..4).all(|a| g.range(a) == g.source(a)));
        assert!(g.isomorphism_to(&Groupoid::pair(2).unwrap()).is_none());
    }

    #[test]
    fn non_action_rejected() {
        // Z/3 "acting" on two points with the generator swapping: g·g·g ≠ id
        let bad = vec![vec![0, 1, 0], vec![1, 0, 1]];
        assert!(matches!(Groupoid::from_action(&cyclic_table(3), 2, &bad), Err(Error::NotAnAction(_))));
    }

    #[test]
    fn products_and_unions() {
        let z2 = Groupoid::cyclic(2).unwrap();
        let z3 = Groupoid::cyclic(3).unwrap();
        let p2 = Groupoid::pair(2).unwrap();
        let prod = Groupoid::product(&z2, &p2).unwrap();
        assert_eq!((prod.n_arrows(), prod.n_units()), (8, 2));
        assert!(prod.validate().is_empty());
        let uni = Groupoid::disjoint_union(&z2, &z3).unwrap();
        assert_eq!((uni.n_arrows(), uni.n_units()), (5, 2));
        assert!(uni.validate().is_empty());
        let (rf, sf) = uni.fibers(0).unwrap();
        assert!(rf.iter().chain(&sf).all(|&a| a < 2));
    }

    #[test]
    fn product_associator() {
        let a = Groupoid::cyclic(2).unwrap();
        let b = Groupoid::pair(2).unwrap();
        let c = Groupoid::cyclic(2).unwrap();
        let left = Groupoid::product(&Groupoid::product(&a, &b).unwrap(), &c).unwrap();
        let right = Groupoid::product(&a, &Groupoid::product(&b, &c).unwrap()).unwrap();
        // with the row-major indexing the identity relabeling already works
        for g in 0..left.n_arrows() {
            for h in 0..left.n_arrows() {
                assert_eq!(left.compose(g, h), right.compose(g, h));
            }
        }
        assert!(left.isomorphism_to(&right).is_some());
    }

    #[test]
    fn fiber_sizes() {
        let p3 = Groupoid::pair(3).unwrap();
        for &x in p3.units() {
            let (rf, sf) = p3.fibers(x).unwrap();
            assert_eq!((rf.len(), sf.len()), (3, 3));
            let mut inv: Vec<usize> = rf.iter().map(|&g| p3.inverse(g)).collect();
            inv.sort();
            let mut sorted = sf.clone();
            sorted.sort();
            assert_eq!(inv, sorted);
        }
        let z4 = Groupoid::cyclic(4).unwrap();
        let (rf, sf) = z4.fibers(0).unwrap();
        assert_eq!((rf.len(), sf.len()), (4, 4));
        assert!(matches!(p3.fibers(1), Err(Error::NotAUnit(1))));
    }

    #[test]
    fn size_cap_enforced() {
        assert!(matches!(Groupoid::pair(17), Err(Error::SizeCapExceeded { .. })));
        assert!(with_size_cap(300, || Groupoid::pair(17)).is_ok());
    }

    #[test]
    fn symmetric_group_is_nonabelian() {
        let t = symmetric_table(3);
        assert!((0..6).any(|a| (0..6).any(|b| t[a][b] != t[b][a])));
    }
}
