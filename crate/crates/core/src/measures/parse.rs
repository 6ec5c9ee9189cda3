//! Parser for the textual measure descriptors:
//!
//! ```text
//! spec := "rademacher"
//!       | "atoms:" pair ("," pair)*              pair := real "=" weight
//!       | "uniform:a=" real ",b=" real ",n=" int
//!       | "gauss:mean=" real ",sd=" real [",halfwidth=" real] [",n=" int]
//! ```

use super::{DiscreteMeasure, GAUSS_DEFAULT_HALFWIDTH, GAUSS_DEFAULT_N};
use crate::error::{Error, Result};

pub fn parse_spec(spec: &str) -> Result<DiscreteMeasure> {
    let mut c = Cursor { src: spec, pos: 0 };
    if spec == "rademacher" {
        return Ok(DiscreteMeasure::rademacher());
    }
    if c.eat("atoms:") {
        let mut pairs = Vec::new();
        loop {
            let z = c.real()?;
            c.expect("=")?;
            let w = c.weight()?;
            pairs.push((z, w));
            if c.at_end() {
                break;
            }
            c.expect(",")?;
        }
        return DiscreteMeasure::new(pairs);
    }
    if c.eat("uniform:") {
        c.expect("a=")?;
        let a = c.real()?;
        c.expect(",b=")?;
        let b_pos = c.pos;
        let b = c.real()?;
        c.expect(",n=")?;
        let n_pos = c.pos;
        let n = c.int()?;
        c.finish()?;
        if a >= b {
            return Err(c.error_at(b_pos, "uniform requires a < b"));
        }
        if n < 2 {
            return Err(c.error_at(n_pos, "uniform requires n >= 2"));
        }
        return DiscreteMeasure::uniform(a, b, n);
    }
    if c.eat("gauss:") {
        c.expect("mean=")?;
        let mean = c.real()?;
        c.expect(",sd=")?;
        let sd = c.positive_real()?;
        let halfwidth = if c.eat(",halfwidth=") {
            c.positive_real()?
        } else {
            GAUSS_DEFAULT_HALFWIDTH
        };
        let mut n = GAUSS_DEFAULT_N;
        if c.eat(",n=") {
            let n_pos = c.pos;
            n = c.int()?;
            if n < 2 {
                return Err(c.error_at(n_pos, "gauss requires n >= 2"));
            }
        }
        c.finish()?;
        return DiscreteMeasure::gauss(mean, sd, halfwidth, n);
    }
    Err(c.error_here("expected `rademacher`, `atoms:`, `uniform:` or `gauss:`"))
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl Cursor<'_> {
    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn at_end(&self) -> bool {
        self.pos == self.src.len()
    }

    fn eat(&mut self, lit: &str) -> bool {
        if self.rest().starts_with(lit) {
            self.pos += lit.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, lit: &str) -> Result<()> {
        if self.eat(lit) {
            Ok(())
        } else {
            Err(self.error_here(&format!("expected `{lit}`")))
        }
    }

    fn finish(&self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error_here("unexpected trailing input"))
        }
    }

    /// The token starting at `pos`: everything up to the next separator.
    fn token_at(&self, pos: usize) -> &str {
        let tail = &self.src[pos..];
        let end = tail.find([',', '=']).unwrap_or(tail.len());
        if end == 0 {
            &tail[..tail.chars().next().map_or(0, char::len_utf8)]
        } else {
            &tail[..end]
        }
    }

    fn error_at(&self, pos: usize, message: &str) -> Error {
        let token = self.token_at(pos);
        Error::Parse {
            position: pos,
            token: if token.is_empty() {
                "<end of input>".into()
            } else {
                token.into()
            },
            message: message.into(),
        }
    }

    fn error_here(&self, message: &str) -> Error {
        self.error_at(self.pos, message)
    }

    /// Decimal or scientific notation: `[+-]digits[.digits][(e|E)[+-]digits]`.
    fn real(&mut self) -> Result<f64> {
        let start = self.pos;
        let b = self.src.as_bytes();
        let mut i = start;
        if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
            i += 1;
        }
        let int_start = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        let mut digits = i - int_start;
        if i < b.len() && b[i] == b'.' {
            i += 1;
            let frac_start = i;
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
            digits += i - frac_start;
        }
        if digits == 0 {
            return Err(self.error_at(start, "expected a real number"));
        }
        if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
            let mut j = i + 1;
            if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
                j += 1;
            }
            let exp_start = j;
            while j < b.len() && b[j].is_ascii_digit() {
                j += 1;
            }
            if j == exp_start {
                return Err(self.error_at(start, "malformed exponent"));
            }
            i = j;
        }
        let text = &self.src[start..i];
        let value: f64 = text
            .parse()
            .map_err(|_| self.error_at(start, "expected a real number"))?;
        if !value.is_finite() {
            return Err(self.error_at(start, "real number out of range"));
        }
        self.pos = i;
        Ok(value)
    }

    fn positive_real(&mut self) -> Result<f64> {
        let start = self.pos;
        let v = self.real()?;
        if v <= 0.0 {
            return Err(self.error_at(start, "expected a positive real"));
        }
        Ok(v)
    }

    /// Atom weights: non-negative; an all-zero list is reported as degenerate
    /// by the measure constructor.
    fn weight(&mut self) -> Result<f64> {
        let start = self.pos;
        let v = self.real()?;
        if v < 0.0 {
            return Err(self.error_at(start, "weights must be non-negative"));
        }
        Ok(v)
    }

    fn int(&mut self) -> Result<usize> {
        let start = self.pos;
        let b = self.src.as_bytes();
        let mut i = start;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        if i == start {
            return Err(self.error_at(start, "expected an integer"));
        }
        let n = self.src[start..i]
            .parse()
            .map_err(|_| self.error_at(start, "integer out of range"))?;
        self.pos = i;
        Ok(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atoms(spec: &str) -> Vec<(f64, f64)> {
        parse_spec(spec)
            .unwrap()
            .atoms()
            .iter()
            .map(|a| (a.position, a.weight))
            .collect()
    }

    #[test]
    fn spec_examples() {
        assert_eq!(atoms("rademacher"), vec![(-1.0, 0.5), (1.0, 0.5)]);
        assert_eq!(atoms("atoms:1=1"), vec![(1.0, 1.0)]);
        assert_eq!(atoms("atoms:0=2,1=2"), vec![(0.0, 0.5), (1.0, 0.5)]);
    }

    #[test]
    fn duplicates_merge_and_sort() {
        assert_eq!(atoms("atoms:1=1,-1=1,1=2"), vec![(-1.0, 0.25), (1.0, 0.75)]);
        assert_eq!(atoms("atoms:-1e0=0.25,+1.0E0=7.5e-1"), vec![(-1.0, 0.25), (1.0, 0.75)]);
    }

    #[test]
    fn families() {
        let u = parse_spec("uniform:a=-1,b=1,n=4").unwrap();
        let pos: Vec<f64> = u.positions().collect();
        assert_eq!(pos, vec![-0.75, -0.25, 0.25, 0.75]);
        let g = parse_spec("gauss:mean=0,sd=1").unwrap();
        assert_eq!(g.len(), GAUSS_DEFAULT_N);
        assert_eq!(g.atoms()[0].position, -8.0);
        let g = parse_spec("gauss:mean=1,sd=2,halfwidth=3,n=7").unwrap();
        assert_eq!(g.len(), 7);
        assert_eq!(g.atoms()[0].position, -5.0);
        assert_eq!(g.atoms()[6].position, 7.0);
        let g = parse_spec("gauss:mean=0,sd=1,n=5").unwrap();
        assert_eq!(g.atoms()[4].position, 8.0);
    }

    #[test]
    fn errors_name_the_token() {
        match parse_spec("atoms:1=x") {
            Err(Error::Parse { position, token, .. }) => {
                assert_eq!(position, 8);
                assert_eq!(token, "x");
            }
            other => panic!("{other:?}"),
        }
        match parse_spec("atoms:1=-2") {
            Err(Error::Parse { position, token, .. }) => {
                assert_eq!(position, 8);
                assert_eq!(token, "-2");
            }
            other => panic!("{other:?}"),
        }
        match parse_spec("normal:0") {
            Err(Error::Parse { position: 0, token, .. }) => assert_eq!(token, "normal:0"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_spec("uniform:a=1,b=0,n=3"),
            Err(Error::Parse { position: 14, .. })
        ));
        assert!(matches!(parse_spec("uniform:a=0,b=1,n=1"), Err(Error::Parse { .. })));
        assert!(matches!(parse_spec("gauss:mean=0,sd=0"), Err(Error::Parse { .. })));
        assert!(matches!(parse_spec("atoms:1=1,"), Err(Error::Parse { .. })));
        assert!(matches!(parse_spec("atoms:inf=1"), Err(Error::Parse { .. })));
        assert!(matches!(parse_spec("atoms:1e999=1"), Err(Error::Parse { .. })));
        assert!(matches!(parse_spec("rademacher "), Err(Error::Parse { .. })));
        assert!(matches!(
            parse_spec("gauss:mean=0,sd=1,n=5,halfwidth=2"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn all_zero_weights_are_degenerate() {
        assert!(matches!(parse_spec("atoms:1=0,2=0"), Err(Error::Degenerate(_))));
    }
}
