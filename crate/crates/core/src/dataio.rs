//! Text formats, synthetic generation and augmentation of plain datasets.
//!
//! Transactions file: one transaction per line, tokens separated by single
//! spaces, each token `item:quantity:probability`. Utility file: one
//! `item unit-utility` pair per line. In both, lines starting with `#` are
//! comments, blank lines are ignored, CRLF is accepted and LF is written.
//! Transaction ids are the 1-based positions of the transaction lines.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::io::Read;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Geometric;

use crate::error::{Error, Result};
use crate::model::{validate_database, DatabaseBuilder, Item, UncertainDatabase, UtilityTable};

fn read_all(mut r: impl Read, what: &str) -> Result<String> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    String::from_utf8(bytes)
        .map_err(|e| Error::parse(0, 0, format!("{what} is not valid UTF-8: {e}")))
}

/// Yields `(line_number, line)` for every non-comment, non-blank line.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.split('\n').enumerate().filter_map(|(i, line)| {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.is_empty() || line.starts_with('#') {
            None
        } else {
            Some((i + 1, line))
        }
    })
}

fn is_item_label(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

/// `[0-9]+(\.[0-9]+)?`
fn is_decimal(s: &str) -> bool {
    let (int, frac) = match s.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (s, None),
    };
    let digits = |x: &str| !x.is_empty() && x.bytes().all(|b| b.is_ascii_digit());
    digits(int) && frac.is_none_or(digits)
}

/// Splits a line on single spaces, keeping 1-based byte columns.
fn fields(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut col = 1;
    line.split(' ').map(move |f| {
        let c = col;
        col += f.len() + 1;
        (c, f)
    })
}

pub fn parse_utility_table(text: &str) -> Result<UtilityTable> {
    let mut table = UtilityTable::new();
    for (line_no, line) in content_lines(text) {
        let (item, value) = line
            .split_once(' ')
            .ok_or_else(|| Error::parse(line_no, 1, "expected 'item unit-utility'"))?;
        if !is_item_label(item) {
            return Err(Error::parse(
                line_no,
                1,
                format!("invalid item label '{item}'"),
            ));
        }
        let col = item.len() + 2;
        if !is_decimal(value) {
            return Err(Error::parse(
                line_no,
                col,
                format!("invalid unit utility '{value}'"),
            ));
        }
        let unit: f64 = value
            .parse()
            .map_err(|e| Error::parse(line_no, col, format!("invalid unit utility: {e}")))?;
        if table.insert(item, unit).is_some() {
            return Err(Error::parse(
                line_no,
                1,
                format!("item '{item}' listed twice"),
            ));
        }
    }
    Ok(table)
}

/// Parses the transactions text against an already parsed utility table.
pub fn parse_transactions(text: &str, table: UtilityTable) -> Result<UncertainDatabase> {
    let known: HashSet<String> = table.iter().map(|(i, _)| i.as_str().to_owned()).collect();
    let mut builder = DatabaseBuilder::new(table);
    let mut seen: HashSet<&str> = HashSet::new();
    let mut row: Vec<(Item, u32, f64)> = Vec::new();
    for (line_no, line) in content_lines(text) {
        seen.clear();
        row.clear();
        for (col, token) in fields(line) {
            let mut parts = token.splitn(3, ':');
            let (Some(item), Some(qty), Some(prob)) = (parts.next(), parts.next(), parts.next())
            else {
                return Err(Error::parse(
                    line_no,
                    col,
                    format!("expected 'item:quantity:probability', found '{token}'"),
                ));
            };
            if !is_item_label(item) {
                return Err(Error::parse(
                    line_no,
                    col,
                    format!("invalid item label '{item}'"),
                ));
            }
            let qty_col = col + item.len() + 1;
            if qty.is_empty() || !qty.bytes().all(|b| b.is_ascii_digit()) {
                return Err(Error::parse(
                    line_no,
                    qty_col,
                    format!("invalid quantity '{qty}'"),
                ));
            }
            let quantity: u32 = qty
                .parse()
                .map_err(|_| Error::range(line_no, qty_col, format!("quantity {qty} too large")))?;
            if quantity == 0 {
                return Err(Error::range(
                    line_no,
                    qty_col,
                    "quantity must be at least 1",
                ));
            }
            let prob_col = qty_col + qty.len() + 1;
            if !is_decimal(prob) {
                return Err(Error::parse(
                    line_no,
                    prob_col,
                    format!("invalid probability '{prob}'"),
                ));
            }
            let probability: f64 = prob
                .parse()
                .map_err(|e| Error::parse(line_no, prob_col, format!("{e}")))?;
            if !(probability > 0.0 && probability <= 1.0) {
                return Err(Error::range(
                    line_no,
                    prob_col,
                    format!("probability {prob} outside (0, 1]"),
                ));
            }
            if !known.contains(item) {
                return Err(Error::MissingUtility {
                    item: item.to_owned(),
                    line: Some(line_no),
                });
            }
            if !seen.insert(item) {
                return Err(Error::parse(
                    line_no,
                    col,
                    format!("item '{item}' appears twice in one transaction"),
                ));
            }
            row.push((Item::new(item), quantity, probability));
        }
        builder.push(row.drain(..));
    }
    let db = builder.build();
    let violations = validate_database(&db);
    if violations.is_empty() {
        Ok(db)
    } else {
        Err(Error::Validation(violations))
    }
}

/// Reads both files and returns a validated database.
pub fn parse_database(transactions: impl Read, utilities: impl Read) -> Result<UncertainDatabase> {
    let utility_text = read_all(utilities, "utility file")?;
    let table = parse_utility_table(&utility_text)?;
    let tx_text = read_all(transactions, "transactions file")?;
    parse_transactions(&tx_text, table)
}

/// Serializes `db` as `(transactions, utilities)` text. Numbers use the
/// shortest decimal form that parses back to the same value.
pub fn write_database(db: &UncertainDatabase) -> (String, String) {
    let mut tx = String::new();
    for t in db.transactions() {
        for (k, o) in t.occurrences.iter().enumerate() {
            if k > 0 {
                tx.push(' ');
            }
            write!(tx, "{}:{}:{}", db.item(o.item), o.quantity, o.probability).unwrap();
        }
        tx.push('\n');
    }
    let mut ut = String::new();
    for (item, unit) in db.utility_table().iter() {
        writeln!(ut, "{item} {unit}").unwrap();
    }
    (tx, ut)
}

/// Parameters of [`generate`] and [`augment`].
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub num_transactions: usize,
    pub num_items: usize,
    pub avg_transaction_length: f64,
    pub max_quantity: u32,
    pub max_unit_utility: u32,
    pub prob_min: f64,
    pub prob_max: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            seed: 0,
            num_transactions: 1000,
            num_items: 100,
            avg_transaction_length: 8.0,
            max_quantity: 5,
            max_unit_utility: 100,
            prob_min: 0.1,
            prob_max: 1.0,
        }
    }
}

impl GeneratorConfig {
    fn check_value_ranges(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if !(self.prob_min > 0.0 && self.prob_min <= self.prob_max && self.prob_max <= 1.0) {
            return bad(format!(
                "need 0 < prob_min <= prob_max <= 1, got [{}, {}]",
                self.prob_min, self.prob_max
            ));
        }
        if self.max_quantity < 1 {
            return bad("max_quantity must be at least 1".into());
        }
        if self.max_unit_utility < 1 {
            return bad("max_unit_utility must be at least 1".into());
        }
        Ok(())
    }

    pub fn check(&self) -> Result<()> {
        self.check_value_ranges()?;
        if self.avg_transaction_length.is_nan() || self.avg_transaction_length < 1.0 {
            return Err(Error::InvalidArgument(
                "avg_transaction_length must be at least 1".into(),
            ));
        }
        if self.num_items < 1 || self.num_items > u32::MAX as usize {
            return Err(Error::InvalidArgument(
                "num_items must be at least 1".into(),
            ));
        }
        Ok(())
    }

    fn probability(&self, rng: &mut impl Rng) -> f64 {
        if self.prob_min == self.prob_max {
            return self.prob_min;
        }
        let raw = rng.random_range(self.prob_min..=self.prob_max);
        ((raw * 1e4).round() / 1e4).clamp(self.prob_min, self.prob_max)
    }
}

/// Generates a synthetic database. Item `k` (labelled `"k"`, 1-based) is
/// drawn with weight proportional to `1/k`; lengths are geometric with the
/// configured mean, clamped to `[1, num_items]`.
pub fn generate(config: &GeneratorConfig) -> Result<UncertainDatabase> {
    config.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let n = config.num_items;

    let table: UtilityTable = (1..=n)
        .map(|k| {
            let u = rng.random_range(1..=config.max_unit_utility);
            (Item::new(k.to_string()), f64::from(u))
        })
        .collect();
    let weights: Vec<f64> = (1..=n).map(|k| 1.0 / k as f64).collect();
    let picker = WeightedIndex::new(&weights).expect("positive weights");
    let lengths = Geometric::new(1.0 / config.avg_transaction_length)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;

    let mut builder = DatabaseBuilder::new(table);
    let mut chosen: Vec<usize> = Vec::new();
    let mut in_row = vec![false; n];
    for _ in 0..config.num_transactions {
        let len = (1 + lengths.sample(&mut rng) as usize).min(n);
        chosen.clear();
        if 2 * len <= n {
            while chosen.len() < len {
                let k = picker.sample(&mut rng);
                if !in_row[k] {
                    in_row[k] = true;
                    chosen.push(k);
                }
            }
            for &k in &chosen {
                in_row[k] = false;
            }
        } else {
            // Weighted sampling without replacement by exponential keys.
            let mut keyed: Vec<(f64, usize)> = weights
                .iter()
                .enumerate()
                .map(|(k, w)| {
                    let u: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
                    (u.ln() / w, k)
                })
                .collect();
            keyed.sort_unstable_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
            chosen.extend(keyed.iter().take(len).map(|&(_, k)| k));
        }
        chosen.sort_unstable();
        let row: Vec<(Item, u32, f64)> = chosen
            .iter()
            .map(|&k| {
                let q = rng.random_range(1..=config.max_quantity);
                let p = config.probability(&mut rng);
                (Item::new((k + 1).to_string()), q, p)
            })
            .collect();
        builder.push(row);
    }
    Ok(builder.build())
}

/// Turns a plain dataset (whitespace-separated item labels, one transaction
/// per line) into an uncertain quantitative database. Repeated labels on a
/// line are merged and their quantities summed.
pub fn augment(plain: impl Read, config: &GeneratorConfig) -> Result<UncertainDatabase> {
    config.check_value_ranges()?;
    let text = read_all(plain, "plain transactions file")?;
    let mut rows: Vec<Vec<&str>> = Vec::new();
    for (line_no, line) in content_lines(&text) {
        let mut row = Vec::new();
        let mut rest = line;
        let mut offset = 0;
        while let Some(start) = rest.find(|c: char| !c.is_whitespace()) {
            let tail = &rest[start..];
            let end = tail.find(char::is_whitespace).unwrap_or(tail.len());
            let token = &tail[..end];
            if !is_item_label(token) {
                return Err(Error::parse(
                    line_no,
                    offset + start + 1,
                    format!("invalid item label '{token}'"),
                ));
            }
            row.push(token);
            offset += start + end;
            rest = &tail[end..];
        }
        if !row.is_empty() {
            rows.push(row);
        }
    }

    let mut universe: Vec<Item> = rows.iter().flatten().map(|s| Item::new(*s)).collect();
    universe.sort();
    universe.dedup();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let table: UtilityTable = universe
        .into_iter()
        .map(|i| (i, f64::from(rng.random_range(1..=config.max_unit_utility))))
        .collect();

    let mut builder = DatabaseBuilder::new(table);
    for row in rows {
        let mut merged: Vec<(&str, u32)> = Vec::with_capacity(row.len());
        for token in row {
            let q = rng.random_range(1..=config.max_quantity);
            match merged.iter_mut().find(|(t, _)| *t == token) {
                Some((_, total)) => *total = total.saturating_add(q),
                None => merged.push((token, q)),
            }
        }
        let occurrences: Vec<(Item, u32, f64)> = merged
            .into_iter()
            .map(|(t, q)| (Item::new(t), q, config.probability(&mut rng)))
            .collect();
        builder.push(occurrences);
    }
    Ok(builder.build())
}
