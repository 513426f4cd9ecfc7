//! Generators for the standard finite families: chains, Boolean algebras,
//! integer intervals `Γ(ℤᵏ, u)`, direct products and horizontal sums.

use std::fmt;
use std::str::FromStr;

use crate::algebra::{validate_effect_algebra, AlgebraError, EffectAlgebra, RawTable};

/// Default bound on the number of elements of generated or loaded algebras.
pub const DEFAULT_MAX_SIZE: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    /// `{0, 1, …, n}` with `k + m` defined iff `k + m ≤ n`.
    Chain(u32),
    /// Subsets of a `k`-element set, disjoint union as the partial sum.
    Boolean(u32),
    /// `{g ∈ ℤᵏ : 0 ≤ g ≤ u}` under the componentwise order.
    Interval(Vec<u32>),
    Product(Vec<Family>),
    /// Disjoint union of the components with their zeros and units glued.
    HorizontalSum(Vec<Family>),
}

impl Family {
    /// Number of elements the family produces, saturating on overflow.
    pub fn size(&self) -> usize {
        match self {
            Family::Chain(n) => *n as usize + 1,
            Family::Boolean(k) => 1usize.checked_shl(*k).unwrap_or(usize::MAX),
            Family::Interval(u) => u
                .iter()
                .fold(1usize, |acc, &x| acc.saturating_mul(x as usize + 1)),
            Family::Product(fs) => fs
                .iter()
                .fold(1usize, |acc, f| acc.saturating_mul(f.size())),
            Family::HorizontalSum(fs) => fs.iter().fold(2usize, |acc, f| {
                acc.saturating_add(f.size().saturating_sub(2))
            }),
        }
    }

    /// The MO2 example: two copies of the four-element Boolean algebra glued
    /// at their bounds.
    pub fn mo2() -> Family {
        Family::HorizontalSum(vec![Family::Boolean(2), Family::Boolean(2)])
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list(f: &mut fmt::Formatter<'_>, name: &str, fs: &[Family]) -> fmt::Result {
            write!(f, "{name}(")?;
            for (i, x) in fs.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{x}")?;
            }
            f.write_str(")")
        }
        match self {
            Family::Chain(n) => write!(f, "chain({n})"),
            Family::Boolean(k) => write!(f, "boolean({k})"),
            Family::Interval(u) => {
                let parts: Vec<String> = u.iter().map(u32::to_string).collect();
                write!(f, "interval({})", parts.join(","))
            }
            Family::Product(fs) => list(f, "product", fs),
            Family::HorizontalSum(fs) => list(f, "hsum", fs),
        }
    }
}

impl FromStr for Family {
    type Err = String;

    /// Grammar: `chain(n)`, `boolean(k)`, `interval(u1,…,uk)`,
    /// `product(F,…)`, `hsum(F,…)`; shorthands `chainN`, `booleanK`, `mo2`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Parser {
            s: s.as_bytes(),
            pos: 0,
        };
        let f = p.family()?;
        p.skip_ws();
        if p.pos != p.s.len() {
            return Err(format!("trailing input in family spec {s:?}"));
        }
        Ok(f)
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.s.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn word(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len()
            && (self.s[self.pos].is_ascii_alphabetic()
                || self.s[self.pos] == b'-'
                || self.s[self.pos] == b'_')
        {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.s[start..self.pos]).to_lowercase()
    }

    fn number(&mut self) -> Result<u32, String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| format!("expected a number at byte {start}"))
    }

    fn numbers(&mut self) -> Result<Vec<u32>, String> {
        let mut out = vec![self.number()?];
        while self.eat(b',') {
            out.push(self.number()?);
        }
        if !self.eat(b')') {
            return Err("expected ')'".into());
        }
        Ok(out)
    }

    fn families(&mut self) -> Result<Vec<Family>, String> {
        let mut out = vec![self.family()?];
        while self.eat(b',') {
            out.push(self.family()?);
        }
        if !self.eat(b')') {
            return Err("expected ')'".into());
        }
        Ok(out)
    }

    fn family(&mut self) -> Result<Family, String> {
        let w = self.word();
        if w == "mo" && self.eat(b'2') {
            return Ok(Family::mo2());
        }
        let single = |v: Vec<u32>, name: &str| match v.as_slice() {
            [n] => Ok(*n),
            _ => Err(format!("{name} takes one argument")),
        };
        if self.eat(b'(') {
            match w.as_str() {
                "chain" => Ok(Family::Chain(single(self.numbers()?, "chain")?)),
                "boolean" => Ok(Family::Boolean(single(self.numbers()?, "boolean")?)),
                "interval" => Ok(Family::Interval(self.numbers()?)),
                "product" => Ok(Family::Product(self.families()?)),
                "hsum" | "horizontal-sum" | "horizontal_sum" => {
                    Ok(Family::HorizontalSum(self.families()?))
                }
                _ => Err(format!("unknown family {w:?}")),
            }
        } else {
            match w.as_str() {
                "chain" => Ok(Family::Chain(self.number()?)),
                "boolean" => Ok(Family::Boolean(self.number()?)),
                _ => Err(format!("unknown family {w:?}")),
            }
        }
    }
}

/// Builds and validates the algebra of a family, refusing anything larger
/// than `max_size` elements.
pub fn generate(family: &Family, max_size: usize) -> Result<EffectAlgebra, AlgebraError> {
    let size = family.size();
    if size > max_size {
        return Err(AlgebraError::SizeLimitExceeded {
            size,
            limit: max_size,
        });
    }
    validate_effect_algebra(&raw_table(family)?)
}

fn raw_table(family: &Family) -> Result<RawTable, AlgebraError> {
    match family {
        Family::Chain(n) => {
            if *n == 0 {
                return Err(AlgebraError::DegenerateUnit);
            }
            Ok(interval_table(&[*n], false))
        }
        Family::Boolean(k) => {
            if *k == 0 {
                return Err(AlgebraError::DegenerateUnit);
            }
            Ok(boolean_table(*k as usize))
        }
        Family::Interval(u) => {
            if u.iter().all(|&x| x == 0) {
                return Err(AlgebraError::DegenerateUnit);
            }
            Ok(interval_table(u, true))
        }
        Family::Product(fs) => {
            let parts = fs.iter().map(raw_table).collect::<Result<Vec<_>, _>>()?;
            if parts.is_empty() {
                return Err(AlgebraError::InvalidTable("empty product".into()));
            }
            Ok(product_table(&parts))
        }
        Family::HorizontalSum(fs) => {
            let parts = fs.iter().map(raw_table).collect::<Result<Vec<_>, _>>()?;
            if parts.is_empty() {
                return Err(AlgebraError::InvalidTable("empty horizontal sum".into()));
            }
            Ok(horizontal_sum_table(&parts))
        }
    }
}

/// Mixed-radix enumeration of `{0..=u₁} × … × {0..=uₖ}`, first coordinate
/// most significant.
fn interval_table(u: &[u32], tuple_labels: bool) -> RawTable {
    let radix: Vec<usize> = u.iter().map(|&x| x as usize + 1).collect();
    let n: usize = radix.iter().product();
    let decode = |mut i: usize| {
        let mut v = vec![0usize; radix.len()];
        for k in (0..radix.len()).rev() {
            v[k] = i % radix[k];
            i /= radix[k];
        }
        v
    };
    let encode = |v: &[usize]| v.iter().zip(&radix).fold(0, |acc, (x, r)| acc * r + x);
    let points: Vec<Vec<usize>> = (0..n).map(decode).collect();
    let labels = points
        .iter()
        .map(|v| {
            let parts: Vec<String> = v.iter().map(usize::to_string).collect();
            if tuple_labels {
                format!("({})", parts.join(","))
            } else {
                parts.join(",")
            }
        })
        .collect();
    let mut sums = vec![];
    for (a, va) in points.iter().enumerate() {
        for (b, vb) in points.iter().enumerate() {
            let s: Vec<usize> = va.iter().zip(vb).map(|(x, y)| x + y).collect();
            if s.iter().zip(&radix).all(|(x, r)| x < r) {
                sums.push([a, b, encode(&s)]);
            }
        }
    }
    RawTable {
        labels,
        zero: 0,
        one: n - 1,
        sums,
    }
}

/// Subsets as bitmasks; the label lists membership per atom, atom 0 first.
fn boolean_table(k: usize) -> RawTable {
    let n = 1usize << k;
    let labels = (0..n)
        .map(|m| {
            (0..k)
                .map(|i| if m >> i & 1 == 1 { '1' } else { '0' })
                .collect()
        })
        .collect();
    let mut sums = vec![];
    for a in 0..n {
        for b in 0..n {
            if a & b == 0 {
                sums.push([a, b, a | b]);
            }
        }
    }
    RawTable {
        labels,
        zero: 0,
        one: n - 1,
        sums,
    }
}

fn product_table(parts: &[RawTable]) -> RawTable {
    let sizes: Vec<usize> = parts.iter().map(|p| p.labels.len()).collect();
    let n: usize = sizes.iter().product();
    let decode = |mut i: usize| {
        let mut v = vec![0usize; sizes.len()];
        for k in (0..sizes.len()).rev() {
            v[k] = i % sizes[k];
            i /= sizes[k];
        }
        v
    };
    let encode = |v: &[usize]| v.iter().zip(&sizes).fold(0, |acc, (x, r)| acc * r + x);
    let lookups: Vec<Vec<Option<usize>>> = parts
        .iter()
        .map(|p| {
            let m = p.labels.len();
            let mut t = vec![None; m * m];
            for &[a, b, c] in &p.sums {
                t[a * m + b] = Some(c);
            }
            t
        })
        .collect();
    let labels = (0..n)
        .map(|i| {
            let v = decode(i);
            let parts: Vec<&str> = v
                .iter()
                .zip(parts)
                .map(|(&x, p)| p.labels[x].as_str())
                .collect();
            format!("({})", parts.join(","))
        })
        .collect();
    let mut sums = vec![];
    for a in 0..n {
        let va = decode(a);
        for b in 0..n {
            let vb = decode(b);
            let s: Option<Vec<usize>> = (0..sizes.len())
                .map(|k| lookups[k][va[k] * sizes[k] + vb[k]])
                .collect();
            if let Some(s) = s {
                sums.push([a, b, encode(&s)]);
            }
        }
    }
    let zero = encode(&parts.iter().map(|p| p.zero).collect::<Vec<_>>());
    let one = encode(&parts.iter().map(|p| p.one).collect::<Vec<_>>());
    RawTable {
        labels,
        zero,
        one,
        sums,
    }
}

/// Element order: shared `0`, then each component's proper elements in their
/// own order, then shared `1`. Proper elements are labelled `c:label`.
fn horizontal_sum_table(parts: &[RawTable]) -> RawTable {
    let mut labels = vec!["0".to_string()];
    let mut maps: Vec<Vec<usize>> = vec![];
    let total_inner: usize = parts.iter().map(|p| p.labels.len() - 2).sum();
    let one = total_inner + 1;
    for (c, p) in parts.iter().enumerate() {
        let mut map = vec![0; p.labels.len()];
        for (i, l) in p.labels.iter().enumerate() {
            map[i] = if i == p.zero {
                0
            } else if i == p.one {
                one
            } else {
                labels.push(format!("{c}:{l}"));
                labels.len() - 1
            };
        }
        maps.push(map);
    }
    labels.push("1".to_string());
    let mut sums: Vec<[usize; 3]> = vec![];
    for (p, map) in parts.iter().zip(&maps) {
        for &[a, b, c] in &p.sums {
            sums.push([map[a], map[b], map[c]]);
        }
    }
    sums.sort_unstable();
    sums.dedup();
    RawTable {
        labels,
        zero: 0,
        one,
        sums,
    }
}

/// The standard test zoo: chains `n ≤ 8`, Boolean `2ᵏ` with `k ≤ 4`, products
/// up to 64 elements, integer intervals and horizontal sums.
pub fn standard_zoo() -> Vec<Family> {
    use Family::*;
    let mut zoo = vec![];
    zoo.extend((1..=8).map(Chain));
    zoo.extend((1..=4).map(Boolean));
    zoo.extend([
        Product(vec![Chain(1), Chain(2)]),
        Product(vec![Chain(2), Chain(3)]),
        Product(vec![Chain(3), Chain(3)]),
        Product(vec![Chain(1), Chain(1), Chain(2)]),
        Product(vec![Chain(3), Chain(3), Chain(3)]),
        Product(vec![Chain(7), Chain(7)]),
        Product(vec![Boolean(2), Chain(2)]),
        Product(vec![Boolean(3), Chain(3)]),
        Product(vec![
            Chain(1),
            Chain(1),
            Chain(1),
            Chain(1),
            Chain(1),
            Chain(1),
        ]),
        Interval(vec![1, 2]),
        Interval(vec![2, 2, 1]),
        Family::mo2(),
        HorizontalSum(vec![Chain(2), Chain(2)]),
        HorizontalSum(vec![Boolean(2), Boolean(2), Boolean(2)]),
        HorizontalSum(vec![Chain(3), Boolean(2)]),
        HorizontalSum(vec![Boolean(3), Chain(2)]),
    ]);
    zoo
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Elem;

    #[test]
    fn chain_one_is_two_element() {
        let m = generate(&Family::Chain(1), DEFAULT_MAX_SIZE).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.labels(), &["0", "1"]);
    }

    #[test]
    fn interval_z2() {
        let m = generate(&Family::Interval(vec![1, 2]), DEFAULT_MAX_SIZE).unwrap();
        assert_eq!(m.len(), 6);
        assert_eq!(m.label(m.zero()), "(0,0)");
        assert_eq!(m.label(m.one()), "(1,2)");
        let a = m.elem("(0,1)").unwrap();
        assert_eq!(m.label(m.supplement(a)), "(1,1)");
        assert!(m.leq(a, m.elem("(1,2)").unwrap()));
        assert!(!m.leq(m.elem("(1,0)").unwrap(), a));
    }

    #[test]
    fn mo2_layout() {
        let m = generate(&Family::mo2(), DEFAULT_MAX_SIZE).unwrap();
        assert_eq!(m.labels(), &["0", "0:10", "0:01", "1:10", "1:01", "1"]);
        let a = Elem::from_index(1);
        let b = Elem::from_index(3);
        assert_eq!(m.supplement(a), Elem::from_index(2));
        assert_eq!(m.sum(a, b), None);
        assert_eq!(m.meet(a, b), Some(m.zero()));
        assert_eq!(m.join(a, b), Some(m.one()));
    }

    #[test]
    fn horizontal_sum_of_three_element_chains() {
        let m = generate(
            &Family::HorizontalSum(vec![Family::Chain(2), Family::Chain(2)]),
            64,
        )
        .unwrap();
        assert_eq!(m.len(), 4);
        let a = m.elem("0:1").unwrap();
        let b = m.elem("1:1").unwrap();
        assert_eq!(m.sum(a, a), Some(m.one()));
        assert_eq!(m.sum(b, b), Some(m.one()));
        assert_eq!(m.sum(a, b), None);
    }

    #[test]
    fn sizes_and_limits() {
        for f in standard_zoo() {
            let m = generate(&f, DEFAULT_MAX_SIZE).unwrap();
            assert_eq!(m.len(), f.size(), "{f}");
        }
        assert!(matches!(
            generate(&Family::Boolean(7), DEFAULT_MAX_SIZE),
            Err(AlgebraError::SizeLimitExceeded {
                size: 128,
                limit: 64
            })
        ));
        assert_eq!(
            generate(
                &Family::Product(vec![Family::Chain(1), Family::Chain(2)]),
                64
            )
            .unwrap()
            .len(),
            6
        );
    }

    #[test]
    fn parse_family() {
        let cases = [
            ("chain(3)", Family::Chain(3)),
            ("chain3", Family::Chain(3)),
            ("boolean2", Family::Boolean(2)),
            ("interval(1, 2)", Family::Interval(vec![1, 2])),
            (
                "product(chain2,chain(3))",
                Family::Product(vec![Family::Chain(2), Family::Chain(3)]),
            ),
            ("hsum(boolean(2),boolean(2))", Family::mo2()),
            ("mo2", Family::mo2()),
        ];
        for (s, f) in cases {
            assert_eq!(s.parse::<Family>().unwrap(), f, "{s}");
            assert_eq!(f.to_string().parse::<Family>().unwrap(), f);
        }
        assert!("chain(".parse::<Family>().is_err());
        assert!("torus(3)".parse::<Family>().is_err());
    }
}
