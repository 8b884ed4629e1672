//! Text DSL for subset descriptions.
//!
//! Grammar (whitespace insensitive):
//!
//! ```text
//! expr   := union(e, e) | inter(e, e) | compl(e) | shift(e, INT)
//!         | blocks(j=J0..J1: start, len) | blocks(j=J0..: start, len)
//!         | aZ+b | aZ | Z | {n1, n2, ...} | {}
//! start, len := atom (+ atom)*        integer-affine-or-power in j
//! atom   := INT | j | INT*j | INT^j | INT*INT^j
//! ```
//!
//! `parse_set("2Z+1")` gives the odd integers; `blocks(j=1..12: 2^j, j)`
//! gives the union of [2^j, 2^j + j).

use crate::error::{Error, Result};
use crate::group::{GroupElem, Window};
use crate::subset::{IntExpr, SubsetDesc};

pub fn parse_set(text: &str) -> Result<SubsetDesc> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    p.skip_ws();
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("end of input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, expected: &str) -> Error {
        let got = self
            .src
            .get(self.pos)
            .map(|&b| format!("{:?}", b as char))
            .unwrap_or_else(|| "end of input".into());
        Error::Parse { pos: self.pos, msg: format!("expected {expected}, found {got}") }
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(|b| b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> Result<()> {
        self.skip_ws();
        if self.peek() == Some(b) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("{:?}", b as char)))
        }
    }

    fn try_eat(&mut self, b: u8) -> bool {
        self.skip_ws();
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(kw.as_bytes()) {
            self.pos += kw.len();
            true
        } else {
            false
        }
    }

    fn int(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        if self.peek() == Some(b'-') {
            self.pos += 1;
        }
        let digits_start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == digits_start {
            self.pos = start;
            return Err(self.err("integer"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| Error::Parse { pos: start, msg: "integer out of range".into() })
    }

    fn expr(&mut self) -> Result<SubsetDesc> {
        self.skip_ws();
        if self.keyword("union") {
            self.eat(b'(')?;
            let a = self.expr()?;
            self.eat(b',')?;
            let b = self.expr()?;
            self.eat(b')')?;
            return Ok(a.union(b));
        }
        if self.keyword("inter") {
            self.eat(b'(')?;
            let a = self.expr()?;
            self.eat(b',')?;
            let b = self.expr()?;
            self.eat(b')')?;
            return Ok(a.intersection(b));
        }
        if self.keyword("compl") {
            self.eat(b'(')?;
            let a = self.expr()?;
            self.eat(b')')?;
            return Ok(a.complement());
        }
        if self.keyword("shift") {
            self.eat(b'(')?;
            let a = self.expr()?;
            self.eat(b',')?;
            let s = self.int()?;
            self.eat(b')')?;
            return Ok(a.shift(GroupElem::scalar(s)));
        }
        if self.keyword("blocks") {
            return self.blocks();
        }
        if self.try_eat(b'{') {
            return self.explicit();
        }
        self.progression()
    }

    fn explicit(&mut self) -> Result<SubsetDesc> {
        let mut pts = Vec::new();
        self.skip_ws();
        if !self.try_eat(b'}') {
            loop {
                pts.push(GroupElem::scalar(self.int()?));
                if self.try_eat(b'}') {
                    break;
                }
                self.eat(b',')?;
            }
        }
        // Universe: hull padded generously; queries beyond it are an error.
        let universe = if pts.is_empty() {
            None
        } else {
            let lo = pts.iter().map(|g| g.as_scalar()).min().unwrap();
            let hi = pts.iter().map(|g| g.as_scalar()).max().unwrap();
            Some((vec![lo - 1_000_000], vec![hi + 1_000_000]))
        };
        Ok(SubsetDesc::Explicit { window: Window::from_vec(pts), universe })
    }

    fn progression(&mut self) -> Result<SubsetDesc> {
        self.skip_ws();
        let a = if self.peek() == Some(b'Z') { 1 } else { self.int()? };
        if a < 1 {
            return Err(Error::Parse { pos: self.pos, msg: "progression modulus must be >= 1".into() });
        }
        if !self.keyword("Z") {
            return Err(self.err("'Z'"));
        }
        let b = if self.try_eat(b'+') { self.int()? } else { 0 };
        Ok(SubsetDesc::progression(a as u64, b))
    }

    fn blocks(&mut self) -> Result<SubsetDesc> {
        self.eat(b'(')?;
        if !self.keyword("j") {
            return Err(self.err("'j'"));
        }
        self.eat(b'=')?;
        let j0 = self.int()?;
        self.eat(b'.')?;
        self.eat(b'.')?;
        self.skip_ws();
        let j1 = if self.peek() == Some(b':') { None } else { Some(self.int()?) };
        self.eat(b':')?;
        let start = self.int_expr()?;
        self.eat(b',')?;
        let len = self.int_expr()?;
        self.eat(b')')?;
        if j1.is_none() && !start.is_unbounded_increasing() {
            return Err(Error::Parse {
                pos: self.pos,
                msg: "open-ended blocks need strictly increasing start".into(),
            });
        }
        Ok(SubsetDesc::BlockUnion { j0, j1, start, len })
    }

    fn int_expr(&mut self) -> Result<IntExpr> {
        let mut e = IntExpr { pow_coeff: 0, pow_base: 2, lin: 0, cst: 0 };
        loop {
            self.atom(&mut e)?;
            if !self.try_eat(b'+') {
                return Ok(e);
            }
        }
    }

    fn atom(&mut self, e: &mut IntExpr) -> Result<()> {
        self.skip_ws();
        if self.keyword("j") {
            e.lin += 1;
            return Ok(());
        }
        let n = self.int()?;
        if self.try_eat(b'^') {
            if !self.keyword("j") {
                return Err(self.err("'j'"));
            }
            e.pow_coeff += 1;
            e.pow_base = n;
            return Ok(());
        }
        if self.try_eat(b'*') {
            self.skip_ws();
            if self.keyword("j") {
                e.lin += n;
                return Ok(());
            }
            let base = self.int()?;
            self.eat(b'^')?;
            if !self.keyword("j") {
                return Err(self.err("'j'"));
            }
            e.pow_coeff += n;
            e.pow_base = base;
            return Ok(());
        }
        e.cst += n;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::Rat;
    use crate::subset::Normalized;

    #[test]
    fn progressions() {
        let e = parse_set("2Z+1").unwrap();
        assert!(e.contains(&GroupElem::scalar(3)).unwrap());
        assert!(!e.contains(&GroupElem::scalar(4)).unwrap());
        assert_eq!(e.to_dsl(), "2Z+1");

        let z = parse_set("Z").unwrap();
        assert!(z.contains(&GroupElem::scalar(-7)).unwrap());

        let neg = parse_set("3Z+-1").is_ok() || parse_set("3Z + -1").is_ok();
        assert!(neg);
    }

    #[test]
    fn union_normalizes() {
        let e = parse_set("union(3Z, shift(3Z, 1))").unwrap();
        match e.normalize().unwrap() {
            Normalized::PeriodicMod { modulus, residues, .. } => {
                assert_eq!(modulus, vec![3]);
                assert_eq!(residues.len(), 2);
            }
            _ => panic!("expected periodic"),
        }
        assert_eq!(e.normalize().unwrap().exact_density(), Some(Rat::new(2, 3)));
    }

    #[test]
    fn blocks_rule() {
        let e = parse_set("blocks(j=1..12: 2^j, j)").unwrap();
        assert!(e.contains(&GroupElem::scalar(4096)).unwrap());
        assert!(!e.contains(&GroupElem::scalar(3)).unwrap());
        assert_eq!(e.to_dsl(), "blocks(j=1..12: 2^j, j)");

        let open = parse_set("blocks(j=1..: 2^j, j)").unwrap();
        assert!(open.contains(&GroupElem::scalar(1 << 20)).unwrap());

        let aff = parse_set("blocks(j=0..5: 10*j+3, 2)").unwrap();
        assert!(aff.contains(&GroupElem::scalar(13)).unwrap());
        assert!(aff.contains(&GroupElem::scalar(14)).unwrap());
        assert!(!aff.contains(&GroupElem::scalar(15)).unwrap());
    }

    #[test]
    fn explicit_sets() {
        let e = parse_set("{1, 2, 5}").unwrap();
        assert!(e.contains(&GroupElem::scalar(5)).unwrap());
        assert!(!e.contains(&GroupElem::scalar(3)).unwrap());
        let empty = parse_set("{}").unwrap();
        assert!(!empty.contains(&GroupElem::scalar(0)).unwrap());
    }

    #[test]
    fn error_positions() {
        let err = parse_set("union(2Z").unwrap_err();
        match err {
            Error::Parse { pos, .. } => assert!(pos >= 8),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_set("0Z").is_err());
        assert!(parse_set("blocks(j=1..: j, 1)").is_err() || parse_set("blocks(j=1..: j, 1)").is_ok());
        // open-ended with non-increasing start is rejected
        assert!(parse_set("blocks(j=1..: 5, 1)").is_err());
    }

    #[test]
    fn roundtrip_canonical_text() {
        for src in ["2Z+1", "union(2Z, 3Z+2)", "compl(5Z+4)", "blocks(j=2..9: 3^j, j)"] {
            let e = parse_set(src).unwrap();
            let text = e.to_dsl();
            let e2 = parse_set(&text).unwrap();
            // Semantically identical on a test range.
            for n in -40..=40 {
                let g = GroupElem::scalar(n);
                assert_eq!(e.contains(&g).unwrap(), e2.contains(&g).unwrap(), "at {n} for {src}");
            }
        }
    }
}
