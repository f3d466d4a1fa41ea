//! Line-oriented DSL for 1D piecewise-affine self-maps of an interval.
//!
//! ```text
//! # Suzuki-style step map
//! domain interval 0 3
//! piece [0,3) : 0
//! piece [3,3] : 1
//! ```
//!
//! Guard endpoints and coefficients are kept as exact decimals so that
//! coverage, disjointness, and the image check are decided without rounding.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Location, Result};

/// Exact decimal `mantissa * 10^-scale`.
#[derive(Debug, Clone, Copy)]
pub struct Decimal {
    mantissa: i128,
    scale: u32,
}

const MAX_SCALE: u32 = 30;

impl Decimal {
    pub const ZERO: Decimal = Decimal { mantissa: 0, scale: 0 };
    pub const ONE: Decimal = Decimal { mantissa: 1, scale: 0 };

    pub fn from_int(v: i64) -> Self {
        Decimal { mantissa: v as i128, scale: 0 }
    }

    /// Parses `[-]digits[.digits]`.
    pub fn parse(text: &str) -> Option<Self> {
        let (neg, body) = match text.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, text.strip_prefix('+').unwrap_or(text)),
        };
        let (int, frac) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if int.is_empty() && frac.is_empty() {
            return None;
        }
        if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
            return None;
        }
        let frac = frac.trim_end_matches('0');
        let scale = u32::try_from(frac.len()).ok().filter(|&s| s <= MAX_SCALE)?;
        let mut mantissa: i128 = 0;
        for b in int.bytes().chain(frac.bytes()) {
            mantissa = mantissa.checked_mul(10)?.checked_add((b - b'0') as i128)?;
        }
        Some(Decimal { mantissa: if neg { -mantissa } else { mantissa }, scale }.normalized())
    }

    /// Shortest decimal that round-trips to `v`.
    pub fn from_f64(v: f64) -> Option<Self> {
        if !v.is_finite() {
            return None;
        }
        Decimal::parse(&format!("{v}"))
    }

    fn normalized(mut self) -> Self {
        while self.scale > 0 && self.mantissa % 10 == 0 {
            self.mantissa /= 10;
            self.scale -= 1;
        }
        if self.mantissa == 0 {
            self.scale = 0;
        }
        self
    }

    fn rescale(self, scale: u32) -> Option<i128> {
        let up = scale.checked_sub(self.scale)?;
        self.mantissa.checked_mul(10i128.checked_pow(up)?)
    }

    fn aligned(self, other: Decimal) -> Option<(i128, i128, u32)> {
        let s = self.scale.max(other.scale);
        Some((self.rescale(s)?, other.rescale(s)?, s))
    }

    pub fn checked_add(self, other: Decimal) -> Option<Decimal> {
        let (a, b, s) = self.aligned(other)?;
        Some(Decimal { mantissa: a.checked_add(b)?, scale: s }.normalized())
    }

    pub fn checked_sub(self, other: Decimal) -> Option<Decimal> {
        self.checked_add(-other)
    }

    pub fn checked_mul(self, other: Decimal) -> Option<Decimal> {
        let scale = self.scale + other.scale;
        if scale > 2 * MAX_SCALE {
            return None;
        }
        Some(Decimal { mantissa: self.mantissa.checked_mul(other.mantissa)?, scale }.normalized())
    }

    pub fn signum(self) -> i32 {
        self.mantissa.signum() as i32
    }

    pub fn is_zero(self) -> bool {
        self.mantissa == 0
    }

    /// Correctly rounded conversion.
    pub fn to_f64(self) -> f64 {
        format!("{}e-{}", self.mantissa, self.scale).parse().expect("decimal renders as a float literal")
    }
}

impl std::ops::Neg for Decimal {
    type Output = Decimal;
    fn neg(self) -> Decimal {
        Decimal { mantissa: -self.mantissa, scale: self.scale }
    }
}

impl PartialEq for Decimal {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Decimal {}

impl PartialOrd for Decimal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Decimal {
    fn cmp(&self, other: &Self) -> Ordering {
        // Both values are normalized; a difference in sign decides immediately.
        match self.mantissa.signum().cmp(&other.mantissa.signum()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        match self.aligned(*other) {
            Some((a, b, _)) => a.cmp(&b),
            // Overflow while aligning: compare via floats, which is exact
            // enough to separate values this far apart in scale.
            None => self.to_f64().total_cmp(&other.to_f64()),
        }
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let neg = self.mantissa < 0;
        let digits = self.mantissa.unsigned_abs().to_string();
        let s = self.scale as usize;
        if neg {
            f.write_str("-")?;
        }
        if s == 0 {
            return f.write_str(&digits);
        }
        if digits.len() > s {
            let (i, fr) = digits.split_at(digits.len() - s);
            write!(f, "{i}.{fr}")
        } else {
            write!(f, "0.{}{}", "0".repeat(s - digits.len()), digits)
        }
    }
}

/// Interval guard with open/closed endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Guard {
    pub lo: Decimal,
    pub lo_closed: bool,
    pub hi: Decimal,
    pub hi_closed: bool,
}

impl Guard {
    pub fn is_empty(&self) -> bool {
        match self.lo.cmp(&self.hi) {
            Ordering::Greater => true,
            Ordering::Equal => !(self.lo_closed && self.hi_closed),
            Ordering::Less => false,
        }
    }

    pub fn contains_f64(&self, x: f64) -> bool {
        let (lo, hi) = (self.lo.to_f64(), self.hi.to_f64());
        let above = if self.lo_closed { x >= lo } else { x > lo };
        let below = if self.hi_closed { x <= hi } else { x < hi };
        above && below
    }

    pub fn contains_exact(&self, x: Decimal) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{},{}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

/// `slope * x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Affine {
    pub slope: Decimal,
    pub intercept: Decimal,
}

impl Affine {
    pub fn eval_exact(&self, x: Decimal) -> Option<Decimal> {
        self.slope.checked_mul(x)?.checked_add(self.intercept)
    }
}

impl fmt::Display for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.slope.is_zero() {
            return write!(f, "{}", self.intercept);
        }
        if self.slope == Decimal::ONE {
            f.write_str("x")?;
        } else {
            write!(f, "{}*x", self.slope)?;
        }
        match self.intercept.signum() {
            1 => write!(f, " + {}", self.intercept),
            -1 => write!(f, " - {}", -self.intercept),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece {
    pub guard: Guard,
    pub expr: Affine,
    /// Where the guard starts in the source, when parsed.
    pub location: Option<Location>,
    /// Where the expression starts in the source, when parsed.
    pub expr_location: Option<Location>,
}

/// Validated piecewise-affine self-map of `[domain_lo, domain_hi]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewiseAst {
    pub domain_lo: Decimal,
    pub domain_hi: Decimal,
    /// Pieces sorted by lower endpoint.
    pub pieces: Vec<Piece>,
}

impl PiecewiseAst {
    /// Builds and validates from already-constructed pieces.
    pub fn new(domain_lo: Decimal, domain_hi: Decimal, pieces: Vec<Piece>) -> Result<Self> {
        let ast = PiecewiseAst { domain_lo, domain_hi, pieces };
        ast.validated(Location { line: 1, column: 1 })
    }

    pub fn domain_f64(&self) -> (f64, f64) {
        (self.domain_lo.to_f64(), self.domain_hi.to_f64())
    }

    /// Evaluates the piece whose guard contains `x`; `None` off the domain.
    pub fn eval(&self, x: f64) -> Option<f64> {
        self.pieces
            .iter()
            .find(|p| p.guard.contains_f64(x))
            .map(|p| p.expr.slope.to_f64() * x + p.expr.intercept.to_f64())
    }

    /// Exact fixed points, or `None` when some nondegenerate piece is the identity.
    pub fn exact_fixed_points(&self) -> Option<Vec<f64>> {
        let mut out = Vec::new();
        for p in &self.pieces {
            let one_minus_a = Decimal::ONE.checked_sub(p.expr.slope)?;
            if one_minus_a.is_zero() {
                if !p.expr.intercept.is_zero() {
                    continue;
                }
                if p.guard.lo == p.guard.hi {
                    out.push(p.guard.lo.to_f64());
                    continue;
                }
                return None;
            }
            // x = b / (1 - a); test lo <= x <= hi as lo*(1-a) <= b <= hi*(1-a) (sign-aware)
            let b = p.expr.intercept;
            let lo_s = p.guard.lo.checked_mul(one_minus_a)?;
            let hi_s = p.guard.hi.checked_mul(one_minus_a)?;
            let (lower, upper, lower_closed, upper_closed) = if one_minus_a.signum() > 0 {
                (lo_s, hi_s, p.guard.lo_closed, p.guard.hi_closed)
            } else {
                (hi_s, lo_s, p.guard.hi_closed, p.guard.lo_closed)
            };
            let above = if lower_closed { b >= lower } else { b > lower };
            let below = if upper_closed { b <= upper } else { b < upper };
            if above && below {
                out.push(b.to_f64() / one_minus_a.to_f64());
            }
        }
        out.sort_by(f64::total_cmp);
        out.dedup();
        Some(out)
    }

    /// Canonical DSL text; parsing it yields an equal AST.
    pub fn to_source(&self) -> String {
        let mut s = format!("domain interval {} {}\n", self.domain_lo, self.domain_hi);
        for p in &self.pieces {
            s.push_str(&format!("piece {} : {}\n", p.guard, p.expr));
        }
        s
    }

    fn validated(mut self, domain_at: Location) -> Result<Self> {
        let err = |loc: Option<Location>, token: String, message: String| Error::Parse {
            location: loc.unwrap_or(domain_at),
            token,
            message,
        };
        if self.domain_lo > self.domain_hi {
            return Err(err(
                None,
                format!("{} {}", self.domain_lo, self.domain_hi),
                "domain lower bound exceeds upper bound".into(),
            ));
        }
        if self.pieces.is_empty() {
            return Err(err(None, "domain".into(), "at least one piece is required".into()));
        }
        for p in &self.pieces {
            if p.guard.is_empty() {
                return Err(err(p.location, p.guard.to_string(), "empty guard".into()));
            }
            if p.guard.lo < self.domain_lo || p.guard.hi > self.domain_hi {
                return Err(err(
                    p.location,
                    p.guard.to_string(),
                    format!("guard leaves the domain [{}, {}]", self.domain_lo, self.domain_hi),
                ));
            }
        }
        self.pieces.sort_by(|a, b| a.guard.lo.cmp(&b.guard.lo).then(b.guard.lo_closed.cmp(&a.guard.lo_closed)));

        let first = &self.pieces[0];
        if first.guard.lo > self.domain_lo || !first.guard.lo_closed {
            return Err(err(
                first.location,
                first.guard.to_string(),
                format!(
                    "guard gap {}{},{}{}",
                    '[',
                    self.domain_lo,
                    first.guard.lo,
                    if first.guard.lo_closed { ')' } else { ']' }
                ),
            ));
        }
        for w in self.pieces.windows(2) {
            let (a, b) = (&w[0].guard, &w[1].guard);
            let token = b.to_string();
            match a.hi.cmp(&b.lo) {
                Ordering::Less => {
                    let open = if a.hi_closed { '(' } else { '[' };
                    let close = if b.lo_closed { ')' } else { ']' };
                    return Err(err(w[1].location, token, format!("guard gap {open}{},{}{close}", a.hi, b.lo)));
                }
                Ordering::Greater => {
                    return Err(err(
                        w[1].location,
                        token,
                        format!("guard overlap ({},{}) with {}", b.lo, a.hi.min(b.hi), a),
                    ));
                }
                Ordering::Equal => match (a.hi_closed, b.lo_closed) {
                    (true, true) => {
                        return Err(err(w[1].location, token, format!("guard overlap at {} with {}", b.lo, a)))
                    }
                    (false, false) => return Err(err(w[1].location, token, format!("guard gap at point {}", b.lo))),
                    _ => {}
                },
            }
        }
        let last = self.pieces.last().expect("nonempty");
        if last.guard.hi < self.domain_hi || !last.guard.hi_closed {
            return Err(err(
                last.location,
                last.guard.to_string(),
                format!(
                    "guard gap {}{},{}]",
                    if last.guard.hi_closed { '(' } else { '[' },
                    last.guard.hi,
                    self.domain_hi
                ),
            ));
        }

        // An affine image of an interval is spanned by its endpoint images;
        // the closure is checked, so open endpoints may map onto the boundary.
        for p in &self.pieces {
            for end in [p.guard.lo, p.guard.hi] {
                let img = p
                    .expr
                    .eval_exact(end)
                    .ok_or_else(|| err(p.location, p.expr.to_string(), "coefficient arithmetic overflow".into()))?;
                if img < self.domain_lo || img > self.domain_hi {
                    return Err(err(
                        p.expr_location.or(p.location),
                        p.expr.to_string(),
                        format!(
                            "image escapes domain: T({end}) = {img} is outside [{}, {}]",
                            self.domain_lo, self.domain_hi
                        ),
                    ));
                }
            }
        }
        Ok(self)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Num(Decimal, String),
    Sym(char),
}

impl Tok {
    fn text(&self) -> String {
        match self {
            Tok::Word(w) => w.clone(),
            Tok::Num(_, t) => t.clone(),
            Tok::Sym(c) => c.to_string(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    at: Location,
}

fn lex_line(line: &str, line_no: usize) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = line.char_indices().collect();
    let mut i = 0;
    let col = |i: usize| chars[..i].len() + 1;
    while i < chars.len() {
        let (_, c) = chars[i];
        let at = Location { line: line_no, column: col(i) };
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_ascii_digit() || chars[i].1 == '.') {
                i += 1;
            }
            let text: String = chars[start..i].iter().map(|(_, c)| c).collect();
            let value = Decimal::parse(&text).ok_or_else(|| Error::Parse {
                location: at,
                token: text.clone(),
                message: "malformed decimal literal".into(),
            })?;
            out.push(Spanned { tok: Tok::Num(value, text), at });
            continue;
        }
        if c.is_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].1.is_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            let text: String = chars[start..i].iter().map(|(_, c)| c).collect();
            out.push(Spanned { tok: Tok::Word(text), at });
            continue;
        }
        if "[]():,*+-".contains(c) {
            out.push(Spanned { tok: Tok::Sym(c), at });
            i += 1;
            continue;
        }
        return Err(Error::Parse { location: at, token: c.to_string(), message: "unexpected character".into() });
    }
    Ok(out)
}

struct Cursor {
    toks: Vec<Spanned>,
    pos: usize,
    eol: Location,
}

impl Cursor {
    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    fn here(&self) -> Location {
        self.peek().map(|s| s.at).unwrap_or(self.eol)
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            location: self.here(),
            token: self.peek().map(|s| s.tok.text()).unwrap_or_else(|| "end of line".into()),
            message: message.into(),
        })
    }

    fn next(&mut self) -> Option<Spanned> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect_word(&mut self, word: &str) -> Result<()> {
        match self.peek() {
            Some(Spanned { tok: Tok::Word(w), .. }) if w == word => {
                self.pos += 1;
                Ok(())
            }
            _ => self.fail(format!("expected `{word}`")),
        }
    }

    fn expect_sym(&mut self, sym: char) -> Result<()> {
        match self.peek() {
            Some(Spanned { tok: Tok::Sym(c), .. }) if *c == sym => {
                self.pos += 1;
                Ok(())
            }
            _ => self.fail(format!("expected `{sym}`")),
        }
    }

    fn eat_sym(&mut self, sym: char) -> bool {
        if matches!(self.peek(), Some(Spanned { tok: Tok::Sym(c), .. }) if *c == sym) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    /// `[-] number`
    fn number(&mut self) -> Result<Decimal> {
        let neg = self.eat_sym('-');
        match self.peek() {
            Some(Spanned { tok: Tok::Num(v, _), .. }) => {
                let v = *v;
                self.pos += 1;
                Ok(if neg { -v } else { v })
            }
            _ => self.fail("expected a number"),
        }
    }

    fn finish(&self) -> Result<()> {
        if self.pos < self.toks.len() {
            self.fail("unexpected trailing input")
        } else {
            Ok(())
        }
    }
}

fn parse_guard(cur: &mut Cursor) -> Result<Guard> {
    let lo_closed = match cur.next() {
        Some(Spanned { tok: Tok::Sym('['), .. }) => true,
        Some(Spanned { tok: Tok::Sym('('), .. }) => false,
        _ => {
            cur.pos -= 1;
            return cur.fail("expected `[` or `(` to open a guard");
        }
    };
    let lo = cur.number()?;
    cur.expect_sym(',')?;
    let hi = cur.number()?;
    let hi_closed = match cur.next() {
        Some(Spanned { tok: Tok::Sym(']'), .. }) => true,
        Some(Spanned { tok: Tok::Sym(')'), .. }) => false,
        _ => {
            cur.pos -= 1;
            return cur.fail("expected `]` or `)` to close a guard");
        }
    };
    Ok(Guard { lo, lo_closed, hi, hi_closed })
}

/// Sum of signed terms, each `number`, `number*x`, or `x`.
fn parse_affine(cur: &mut Cursor) -> Result<Affine> {
    let overflow = |cur: &Cursor| cur.fail::<Affine>("coefficient overflow");
    let mut slope = Decimal::ZERO;
    let mut intercept = Decimal::ZERO;
    let mut first = true;
    loop {
        let negative = if cur.eat_sym('-') {
            true
        } else if cur.eat_sym('+') || first {
            false
        } else {
            break;
        };
        first = false;
        let sign = |v: Decimal| if negative { -v } else { v };
        match cur.peek().map(|s| s.tok.clone()) {
            Some(Tok::Word(w)) if w == "x" => {
                cur.pos += 1;
                match slope.checked_add(sign(Decimal::ONE)) {
                    Some(s) => slope = s,
                    None => return overflow(cur),
                }
            }
            Some(Tok::Num(v, _)) => {
                cur.pos += 1;
                if cur.eat_sym('*') {
                    cur.expect_word("x")?;
                    match slope.checked_add(sign(v)) {
                        Some(s) => slope = s,
                        None => return overflow(cur),
                    }
                } else {
                    match intercept.checked_add(sign(v)) {
                        Some(s) => intercept = s,
                        None => return overflow(cur),
                    }
                }
            }
            _ => return cur.fail("expected a term: number, number*x, or x"),
        }
    }
    if first {
        return cur.fail("expected an affine expression");
    }
    Ok(Affine { slope, intercept })
}

/// Parses and validates a mapping definition.
pub fn parse_piecewise(source: &str) -> Result<PiecewiseAst> {
    let mut domain: Option<(Decimal, Decimal, Location)> = None;
    let mut pieces = Vec::new();
    let mut last_line = 1;
    for (idx, raw) in source.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let toks = lex_line(raw, line_no)?;
        if toks.is_empty() {
            continue;
        }
        let eol = Location { line: line_no, column: raw.chars().count() + 1 };
        let mut cur = Cursor { toks, pos: 0, eol };
        let head = cur.here();
        match cur.peek().map(|s| s.tok.clone()) {
            Some(Tok::Word(w)) if w == "domain" => {
                if domain.is_some() {
                    return cur.fail("duplicate domain line");
                }
                if !pieces.is_empty() {
                    return cur.fail("domain line must come before pieces");
                }
                cur.pos += 1;
                cur.expect_word("interval")?;
                let lo = cur.number()?;
                let hi = cur.number()?;
                cur.finish()?;
                domain = Some((lo, hi, head));
            }
            Some(Tok::Word(w)) if w == "piece" => {
                if domain.is_none() {
                    return cur.fail("piece before domain line");
                }
                cur.pos += 1;
                let at = cur.here();
                let guard = parse_guard(&mut cur)?;
                cur.expect_sym(':')?;
                let expr_at = cur.here();
                let expr = parse_affine(&mut cur)?;
                cur.finish()?;
                pieces.push(Piece { guard, expr, location: Some(at), expr_location: Some(expr_at) });
            }
            _ => return cur.fail("expected `domain` or `piece`"),
        }
    }
    let Some((lo, hi, at)) = domain else {
        return Err(Error::Parse {
            location: Location { line: last_line, column: 1 },
            token: "end of input".into(),
            message: "missing `domain interval` line".into(),
        });
    };
    PiecewiseAst { domain_lo: lo, domain_hi: hi, pieces }.validated(at)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> Decimal {
        Decimal::parse(s).unwrap()
    }

    #[test]
    fn decimal_parse_and_display() {
        assert_eq!(d("0.50").to_string(), "0.5");
        assert_eq!(d("-3").to_string(), "-3");
        assert_eq!(d("0.05").to_string(), "0.05");
        assert_eq!(d(".5"), d("0.5"));
        assert!(Decimal::parse("1.2.3").is_none());
        assert!(Decimal::parse("").is_none());
        assert_eq!(d("0.1").checked_add(d("0.2")).unwrap(), d("0.3"));
        assert_eq!(d("0.9").checked_mul(d("1")).unwrap().checked_add(d("0.05")).unwrap(), d("0.95"));
        assert!(d("0.1") < d("0.10001"));
        assert!(d("-2") < d("1"));
        assert_eq!(Decimal::from_f64(0.3).unwrap(), d("0.3"));
        assert_eq!(d("0.1").to_f64(), 0.1);
    }

    #[test]
    fn parses_step_map() {
        let ast = parse_piecewise("domain interval 0 3\npiece [0,3) : 0\npiece [3,3] : 1").unwrap();
        let hand = |x: f64| if x < 3.0 { 0.0 } else { 1.0 };
        for i in 0..=300 {
            let x = 3.0 * i as f64 / 300.0;
            assert_eq!(ast.eval(x), Some(hand(x)), "x = {x}");
        }
        assert_eq!(ast.eval(2.9), Some(0.0));
        assert_eq!(ast.eval(3.0), Some(1.0));
        assert_eq!(ast.exact_fixed_points(), Some(vec![0.0]));
    }

    #[test]
    fn parses_halving_and_comments() {
        let ast = parse_piecewise("# halving\ndomain interval 0 1\n\npiece [0,1] : 0.5*x  # T\n").unwrap();
        assert_eq!(ast.eval(0.8), Some(0.4));
        assert_eq!(ast.exact_fixed_points(), Some(vec![0.0]));
    }

    #[test]
    fn affine_terms() {
        let ast = parse_piecewise("domain interval 0 1\npiece [0,1] : -x + 1").unwrap();
        assert_eq!(ast.eval(0.25), Some(0.75));
        assert_eq!(ast.exact_fixed_points(), Some(vec![0.5]));
        let ast = parse_piecewise("domain interval 0 1\npiece [0,1] : 0.9*x + 0.05").unwrap();
        assert_eq!(ast.exact_fixed_points(), Some(vec![0.5]));
        let ast = parse_piecewise("domain interval -1 1\npiece [-1,1] : -0.5*x - 0.25").unwrap();
        assert_eq!(ast.eval(1.0), Some(-0.75));
    }

    fn parse_err(src: &str) -> (Location, String, String) {
        match parse_piecewise(src) {
            Err(Error::Parse { location, token, message }) => (location, token, message),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn gap_is_reported_with_location() {
        let (loc, token, msg) = parse_err("domain interval 0 1\npiece [0,0.5) : x\npiece [0.6,1] : x");
        assert_eq!(loc, Location { line: 3, column: 7 });
        assert_eq!(token, "[0.6,1]");
        assert!(msg.contains("gap [0.5,0.6)"), "{msg}");
    }

    #[test]
    fn overlap_is_reported() {
        let (loc, _, msg) = parse_err("domain interval 0 1\npiece [0,0.6] : x\npiece [0.5,1] : x");
        assert_eq!(loc.line, 3);
        assert!(msg.contains("overlap"), "{msg}");
        let (_, _, msg) = parse_err("domain interval 0 1\npiece [0,0.5] : x\npiece [0.5,1] : x");
        assert!(msg.contains("overlap at 0.5"), "{msg}");
        let (_, _, msg) = parse_err("domain interval 0 1\npiece [0,0.5) : x\npiece (0.5,1] : x");
        assert!(msg.contains("gap at point 0.5"), "{msg}");
    }

    #[test]
    fn image_escape_is_reported() {
        let (loc, token, msg) = parse_err("domain interval 0 1\npiece [0,1] : 2*x");
        assert_eq!((loc.line, loc.column), (2, 15));
        assert_eq!(token, "2*x");
        assert!(msg.contains("image escapes"), "{msg}");
    }

    #[test]
    fn coverage_edges() {
        let (_, _, msg) = parse_err("domain interval 0 1\npiece (0,1] : x");
        assert!(msg.contains("gap"), "{msg}");
        let (_, _, msg) = parse_err("domain interval 0 1\npiece [0,0.9] : x");
        assert!(msg.contains("gap (0.9,1]"), "{msg}");
        let (_, _, msg) = parse_err("domain interval 0 1\npiece [0,2] : 0");
        assert!(msg.contains("leaves the domain"), "{msg}");
    }

    #[test]
    fn syntax_errors_carry_token() {
        let (loc, token, _) = parse_err("domain interval 0 1\npiece [0,1] 0.5*x");
        assert_eq!((loc.line, loc.column, token.as_str()), (2, 13, "0.5"));
        let (loc, token, _) = parse_err("domain interval 0 1\npiece [0,1] : 0.5*y");
        assert_eq!((loc.column, token.as_str()), (19, "y"));
        let (_, token, _) = parse_err("domian interval 0 1");
        assert_eq!(token, "domian");
        let (_, _, msg) = parse_err("piece [0,1] : x");
        assert!(msg.contains("before domain"));
        let (_, token, _) = parse_err("domain interval 0 1\npiece [0,1] : x $");
        assert_eq!(token, "$");
        let (_, _, msg) = parse_err("# nothing");
        assert!(msg.contains("missing"));
    }

    #[test]
    fn source_round_trip() {
        let src = "domain interval 0 3\npiece [3,3] : 1\npiece [0,3) : 0\n";
        let ast = parse_piecewise(src).unwrap();
        let printed = ast.to_source();
        assert_eq!(printed, "domain interval 0 3\npiece [0,3) : 0\npiece [3,3] : 1\n");
        let again = parse_piecewise(&printed).unwrap();
        assert_eq!(again.to_source(), printed);
    }

    #[test]
    fn identity_piece_has_no_finite_fixed_set() {
        let ast = parse_piecewise("domain interval 0 1\npiece [0,1] : x").unwrap();
        assert_eq!(ast.exact_fixed_points(), None);
    }
}
