use std::fmt;
use std::str::FromStr;

use super::ModelError;

/// One operand of a mapping logic expression: a target index, optionally negated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Target(usize),
    Not(usize),
}

impl Term {
    pub fn index(self) -> usize {
        match self {
            Term::Target(i) | Term::Not(i) => i,
        }
    }

    pub fn is_negated(self) -> bool {
        matches!(self, Term::Not(_))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Target(i) => write!(f, "{i}"),
            Term::Not(i) => write!(f, "NOT({i})"),
        }
    }
}

/// Flat prefix-notation logic over the target list of a mapping record.
///
/// Serialized forms: `0`, `NOT(0)`, `AND(0,1)`, `OR(0,NOT(1))`. Only one
/// operator level exists; `NOT` wraps single targets.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Logic {
    Single(Term),
    And(Vec<Term>),
    Or(Vec<Term>),
}

impl Logic {
    /// `AND` over `n` targets, or a bare index when `n == 1`.
    pub fn conjunction(n: usize) -> Self {
        if n == 1 {
            Logic::Single(Term::Target(0))
        } else {
            Logic::And((0..n).map(Term::Target).collect())
        }
    }

    pub fn terms(&self) -> &[Term] {
        match self {
            Logic::Single(t) => std::slice::from_ref(t),
            Logic::And(ts) | Logic::Or(ts) => ts,
        }
    }

    /// True when every index in `0..n` appears exactly once.
    pub fn references_each_once(&self, n: usize) -> bool {
        let mut seen = vec![false; n];
        for t in self.terms() {
            match seen.get_mut(t.index()) {
                Some(s) if !*s => *s = true,
                _ => return false,
            }
        }
        seen.into_iter().all(|s| s)
    }
}

impl fmt::Display for Logic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (op, terms) = match self {
            Logic::Single(t) => return write!(f, "{t}"),
            Logic::And(ts) => ("AND", ts),
            Logic::Or(ts) => ("OR", ts),
        };
        write!(f, "{op}(")?;
        for (i, t) in terms.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str(")")
    }
}

fn parse_term(s: &str) -> Result<Term, ModelError> {
    let s = s.trim();
    let bad = || ModelError::BadLogic(s.to_string());
    if let Some(inner) = s
        .strip_prefix("NOT(")
        .and_then(|rest| rest.strip_suffix(')'))
    {
        inner.trim().parse().map(Term::Not).map_err(|_| bad())
    } else {
        s.parse().map(Term::Target).map_err(|_| bad())
    }
}

impl FromStr for Logic {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || ModelError::BadLogic(s.to_string());
        for (op, ctor) in [
            ("AND(", Logic::And as fn(Vec<Term>) -> Logic),
            ("OR(", Logic::Or as fn(Vec<Term>) -> Logic),
        ] {
            if let Some(body) = s.strip_prefix(op) {
                let body = body.strip_suffix(')').ok_or_else(bad)?;
                let terms = split_top_level(body)
                    .into_iter()
                    .map(parse_term)
                    .collect::<Result<Vec<_>, _>>()?;
                if terms.len() < 2 {
                    return Err(bad());
                }
                return Ok(ctor(terms));
            }
        }
        parse_term(s).map(Logic::Single)
    }
}

fn split_top_level(body: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    for (i, c) in body.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                parts.push(&body[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&body[start..]);
    parts
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_documented_forms() {
        assert_eq!("0".parse::<Logic>().unwrap(), Logic::Single(Term::Target(0)));
        assert_eq!("NOT(0)".parse::<Logic>().unwrap(), Logic::Single(Term::Not(0)));
        assert_eq!(
            "AND(0,1)".parse::<Logic>().unwrap(),
            Logic::And(vec![Term::Target(0), Term::Target(1)])
        );
        assert_eq!(
            "OR(0, NOT(1))".parse::<Logic>().unwrap(),
            Logic::Or(vec![Term::Target(0), Term::Not(1)])
        );
    }

    #[test]
    fn rejects_malformed() {
        for s in ["", "AND(0)", "AND(0,1", "XOR(0,1)", "NOT(a)", "AND(0,AND(1,2))"] {
            assert!(s.parse::<Logic>().is_err(), "{s}");
        }
    }

    #[test]
    fn reference_check() {
        let l: Logic = "AND(0,1)".parse().unwrap();
        assert!(l.references_each_once(2));
        assert!(!l.references_each_once(3));
        let dup: Logic = "AND(0,0)".parse().unwrap();
        assert!(!dup.references_each_once(1));
        let out_of_range: Logic = "AND(0,2)".parse().unwrap();
        assert!(!out_of_range.references_each_once(2));
    }

    fn arb_term() -> impl Strategy<Value = Term> {
        prop_oneof![
            (0usize..20).prop_map(Term::Target),
            (0usize..20).prop_map(Term::Not)
        ]
    }

    fn arb_logic() -> impl Strategy<Value = Logic> {
        prop_oneof![
            arb_term().prop_map(Logic::Single),
            prop::collection::vec(arb_term(), 2..6).prop_map(Logic::And),
            prop::collection::vec(arb_term(), 2..6).prop_map(Logic::Or),
        ]
    }

    proptest! {
        #[test]
        fn display_parse_round_trip(l in arb_logic()) {
            let s = l.to_string();
            prop_assert_eq!(s.parse::<Logic>().unwrap(), l);
        }
    }
}
