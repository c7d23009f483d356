//! Trade statistics: the price/quantity panel every test runs on, plus the
//! cross-value and Paasche matrices derived from it.

use std::io::{Read, Write};

use thiserror::Error;

use crate::matrix::SquareMatrix;
use crate::scalar::{dot, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DataError {
    #[error("{table} table is empty")]
    Empty { table: &'static str },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-positive price {value} at period row {period}, good column {good}")]
    NonPositivePrice { period: usize, good: usize, value: f64 },
    #[error("negative quantity {value} at period row {period}, good column {good}")]
    NegativeQuantity { period: usize, good: usize, value: f64 },
    #[error("all-zero quantity row at period row {period}")]
    ZeroQuantityRow { period: usize },
    #[error("unparseable cell {cell:?} in {table} table at row {row}, column {col}")]
    Unparseable {
        table: &'static str,
        row: usize,
        col: usize,
        cell: String,
    },
    #[error("csv error in {table} table: {message}")]
    Csv { table: &'static str, message: String },
    #[error("invalid group selection: {0}")]
    InvalidSelection(String),
    #[error("non-positive scale factor {value} for period {period}")]
    NonPositiveScale { period: usize, value: f64 },
}

/// Prices and quantities for `T` periods of `m` goods.
///
/// Row order is period order. Labels are carried for reporting only.
#[derive(Debug, Clone, PartialEq)]
pub struct TradeStatistics<T> {
    prices: Vec<Vec<T>>,
    quantities: Vec<Vec<T>>,
    good_ids: Vec<String>,
    period_ids: Vec<String>,
}

impl<T: Scalar> TradeStatistics<T> {
    /// Validates a panel with generated labels (`g1..gm`, `t1..tT`).
    pub fn new(prices: Vec<Vec<T>>, quantities: Vec<Vec<T>>) -> Result<Self, DataError> {
        let m = prices.first().map_or(0, Vec::len);
        let good_ids = (1..=m).map(|i| format!("g{i}")).collect();
        let period_ids = (1..=prices.len()).map(|t| format!("t{t}")).collect();
        Self::with_labels(prices, quantities, good_ids, period_ids)
    }

    pub fn with_labels(
        prices: Vec<Vec<T>>,
        quantities: Vec<Vec<T>>,
        good_ids: Vec<String>,
        period_ids: Vec<String>,
    ) -> Result<Self, DataError> {
        if prices.is_empty() {
            return Err(DataError::Empty { table: "prices" });
        }
        if quantities.is_empty() {
            return Err(DataError::Empty { table: "quantities" });
        }
        if prices.len() != quantities.len() {
            return Err(DataError::DimensionMismatch(format!(
                "{} price rows vs {} quantity rows",
                prices.len(),
                quantities.len()
            )));
        }
        let m = good_ids.len();
        if m == 0 {
            return Err(DataError::Empty { table: "goods" });
        }
        if period_ids.len() != prices.len() {
            return Err(DataError::DimensionMismatch(format!(
                "{} period labels for {} periods",
                period_ids.len(),
                prices.len()
            )));
        }
        for (t, (p, x)) in prices.iter().zip(&quantities).enumerate() {
            if p.len() != m || x.len() != m {
                return Err(DataError::DimensionMismatch(format!(
                    "period row {} has {} prices and {} quantities, expected {m}",
                    t + 1,
                    p.len(),
                    x.len()
                )));
            }
            for (i, &v) in p.iter().enumerate() {
                if !(v > T::zero()) || !v.is_finite() {
                    return Err(DataError::NonPositivePrice {
                        period: t + 1,
                        good: i + 1,
                        value: v.as_f64(),
                    });
                }
            }
            for (i, &v) in x.iter().enumerate() {
                if !(v >= T::zero()) || !v.is_finite() {
                    return Err(DataError::NegativeQuantity {
                        period: t + 1,
                        good: i + 1,
                        value: v.as_f64(),
                    });
                }
            }
            if x.iter().all(|&v| v == T::zero()) {
                return Err(DataError::ZeroQuantityRow { period: t + 1 });
            }
        }
        Ok(Self {
            prices,
            quantities,
            good_ids,
            period_ids,
        })
    }

    /// Number of periods `T`.
    pub fn periods(&self) -> usize {
        self.prices.len()
    }

    /// Number of goods `m`.
    pub fn goods(&self) -> usize {
        self.good_ids.len()
    }

    pub fn prices(&self) -> &[Vec<T>] {
        &self.prices
    }

    pub fn quantities(&self) -> &[Vec<T>] {
        &self.quantities
    }

    pub fn price(&self, t: usize) -> &[T] {
        &self.prices[t]
    }

    pub fn quantity(&self, t: usize) -> &[T] {
        &self.quantities[t]
    }

    pub fn good_ids(&self) -> &[String] {
        &self.good_ids
    }

    pub fn period_ids(&self) -> &[String] {
        &self.period_ids
    }

    /// Expenditure `<P^t, X^t>`.
    pub fn expenditure(&self, t: usize) -> T {
        dot(&self.prices[t], &self.quantities[t])
    }

    /// `px[t][s] = <P^t, X^s>`.
    pub fn cross_value_matrix(&self) -> CrossValueMatrix<T> {
        let n = self.periods();
        CrossValueMatrix(SquareMatrix::from_fn(n, |t, s| {
            dot(&self.prices[t], &self.quantities[s])
        }))
    }

    /// Shorthand for `paasche_matrix(cross_value_matrix())`.
    pub fn paasche_matrix(&self) -> PaascheMatrix<T> {
        self.cross_value_matrix().paasche()
    }

    /// Statistics on the selected goods only.
    pub fn restrict_to_group(&self, group: &GroupSelection) -> Result<Self, DataError> {
        group.check_for(self.goods())?;
        let pick = |rows: &[Vec<T>]| -> Vec<Vec<T>> {
            rows.iter()
                .map(|r| group.indices().iter().map(|&i| r[i]).collect())
                .collect()
        };
        let good_ids = group
            .indices()
            .iter()
            .map(|&i| self.good_ids[i].clone())
            .collect();
        Self::with_labels(
            pick(&self.prices),
            pick(&self.quantities),
            good_ids,
            self.period_ids.clone(),
        )
    }

    /// Replaces `X^t` by `mu[t] * X^t`.
    pub fn rescale_quantities(&self, mu: &[T]) -> Result<Self, DataError> {
        if mu.len() != self.periods() {
            return Err(DataError::DimensionMismatch(format!(
                "{} scale factors for {} periods",
                mu.len(),
                self.periods()
            )));
        }
        for (t, &v) in mu.iter().enumerate() {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(DataError::NonPositiveScale {
                    period: t + 1,
                    value: v.as_f64(),
                });
            }
        }
        let quantities = self
            .quantities
            .iter()
            .zip(mu)
            .map(|(x, &k)| x.iter().map(|&v| v * k).collect())
            .collect();
        Ok(Self {
            prices: self.prices.clone(),
            quantities,
            good_ids: self.good_ids.clone(),
            period_ids: self.period_ids.clone(),
        })
    }

    /// Statistics with one more observation `(price, quantity)` at the end.
    pub fn with_appended(&self, price: &[T], quantity: &[T]) -> Result<Self, DataError> {
        let mut prices = self.prices.clone();
        let mut quantities = self.quantities.clone();
        prices.push(price.to_vec());
        quantities.push(quantity.to_vec());
        let mut period_ids = self.period_ids.clone();
        period_ids.push(format!("t{}", self.periods() + 1));
        Self::with_labels(prices, quantities, self.good_ids.clone(), period_ids)
    }

    /// Same quantities, new price table (one row per period).
    pub fn with_prices(&self, prices: Vec<Vec<T>>) -> Result<Self, DataError> {
        Self::with_labels(
            prices,
            self.quantities.clone(),
            self.good_ids.clone(),
            self.period_ids.clone(),
        )
    }

    /// Writes the two tables in the CSV layout accepted by
    /// [`load_trade_statistics`].
    pub fn write_csv<W: Write>(&self, prices: W, quantities: W) -> Result<(), DataError> {
        self.write_table("prices", &self.prices, prices)?;
        self.write_table("quantities", &self.quantities, quantities)
    }

    fn write_table<W: Write>(
        &self,
        table: &'static str,
        rows: &[Vec<T>],
        out: W,
    ) -> Result<(), DataError> {
        let err = |e: csv::Error| DataError::Csv {
            table,
            message: e.to_string(),
        };
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["period".to_string()];
        header.extend(self.good_ids.iter().cloned());
        w.write_record(&header).map_err(err)?;
        for (id, row) in self.period_ids.iter().zip(rows) {
            let mut rec = vec![id.clone()];
            rec.extend(row.iter().map(|v| format!("{v}")));
            w.write_record(&rec).map_err(err)?;
        }
        w.flush().map_err(|e| DataError::Csv {
            table,
            message: e.to_string(),
        })
    }
}

struct Table<T> {
    goods: Vec<String>,
    periods: Vec<String>,
    rows: Vec<Vec<T>>,
}

fn read_table<T: Scalar, R: Read>(table: &'static str, src: R) -> Result<Table<T>, DataError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(src);
    let mut records = reader.records();
    let header = match records.next() {
        Some(rec) => rec.map_err(|e| DataError::Csv {
            table,
            message: e.to_string(),
        })?,
        None => return Err(DataError::Empty { table }),
    };
    let goods: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    if goods.is_empty() {
        return Err(DataError::Empty { table });
    }
    let mut periods = Vec::new();
    let mut rows = Vec::new();
    for (r, rec) in records.enumerate() {
        let row_no = r + 1;
        let rec = rec.map_err(|e| DataError::Csv {
            table,
            message: e.to_string(),
        })?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        if rec.len() != goods.len() + 1 {
            return Err(DataError::DimensionMismatch(format!(
                "{table} row {row_no} has {} value cells, header lists {} goods",
                rec.len().saturating_sub(1),
                goods.len()
            )));
        }
        periods.push(rec[0].to_string());
        let mut values = Vec::with_capacity(goods.len());
        for (c, cell) in rec.iter().enumerate().skip(1) {
            let v: f64 = cell.parse().map_err(|_| DataError::Unparseable {
                table,
                row: row_no,
                col: c,
                cell: cell.to_string(),
            })?;
            values.push(T::lit(v));
        }
        rows.push(values);
    }
    if rows.is_empty() {
        return Err(DataError::Empty { table });
    }
    Ok(Table {
        goods,
        periods,
        rows,
    })
}

/// Parses the price and quantity tables (header row of good ids, first
/// column of period ids) and validates the panel.
pub fn load_trade_statistics<T: Scalar, R1: Read, R2: Read>(
    prices: R1,
    quantities: R2,
) -> Result<TradeStatistics<T>, DataError> {
    let p = read_table::<T, _>("prices", prices)?;
    let q = read_table::<T, _>("quantities", quantities)?;
    if p.goods != q.goods {
        return Err(DataError::DimensionMismatch(
            "price and quantity tables have different good headers".into(),
        ));
    }
    if p.periods != q.periods {
        return Err(DataError::DimensionMismatch(
            "price and quantity tables have different period labels".into(),
        ));
    }
    TradeStatistics::with_labels(p.rows, q.rows, p.goods, p.periods)
}

/// `px[t][s] = <P^t, X^s>`.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossValueMatrix<T>(pub SquareMatrix<T>);

impl<T: Scalar> CrossValueMatrix<T> {
    pub fn get(&self, t: usize, s: usize) -> T {
        self.0.get(t, s)
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// `C[t][s] = px[s][s] / px[t][s]`.
    pub fn paasche(&self) -> PaascheMatrix<T> {
        let px = &self.0;
        PaascheMatrix(SquareMatrix::from_fn(px.dim(), |t, s| {
            if t == s {
                T::one()
            } else {
                px.get(s, s) / px.get(t, s)
            }
        }))
    }
}

/// Pairwise Paasche price indices `C[t][s]`; unit diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct PaascheMatrix<T>(pub SquareMatrix<T>);

impl<T: Scalar> PaascheMatrix<T> {
    pub fn get(&self, t: usize, s: usize) -> T {
        self.0.get(t, s)
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn matrix(&self) -> &SquareMatrix<T> {
        &self.0
    }
}

/// Strictly increasing, non-empty list of good positions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupSelection {
    indices: Vec<usize>,
}

impl GroupSelection {
    /// Sorts the positions; rejects empty input, duplicates and positions
    /// outside `0..goods`.
    pub fn new(mut indices: Vec<usize>, goods: usize) -> Result<Self, DataError> {
        if indices.is_empty() {
            return Err(DataError::InvalidSelection("empty selection".into()));
        }
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(DataError::InvalidSelection("duplicate good index".into()));
        }
        let sel = Self { indices };
        sel.check_for(goods)?;
        Ok(sel)
    }

    /// Selection of all `goods` positions.
    pub fn all(goods: usize) -> Self {
        Self {
            indices: (0..goods).collect(),
        }
    }

    /// Resolves good labels against `ts`.
    pub fn from_ids<T: Scalar>(
        ts: &TradeStatistics<T>,
        ids: &[impl AsRef<str>],
    ) -> Result<Self, DataError> {
        let indices = ids
            .iter()
            .map(|id| {
                ts.good_ids()
                    .iter()
                    .position(|g| g == id.as_ref())
                    .ok_or_else(|| {
                        DataError::InvalidSelection(format!("unknown good id {:?}", id.as_ref()))
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(indices, ts.goods())
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Positions (within the original good list) of the goods selected by
    /// `inner`, where `inner` indexes into this selection.
    pub fn compose(&self, inner: &GroupSelection) -> Result<GroupSelection, DataError> {
        inner.check_for(self.len())?;
        Ok(GroupSelection {
            indices: inner.indices.iter().map(|&i| self.indices[i]).collect(),
        })
    }

    pub fn intersect(&self, other: &GroupSelection) -> Option<GroupSelection> {
        let indices: Vec<usize> = self
            .indices
            .iter()
            .copied()
            .filter(|i| other.indices.binary_search(i).is_ok())
            .collect();
        (!indices.is_empty()).then_some(GroupSelection { indices })
    }

    pub fn is_disjoint(&self, other: &GroupSelection) -> bool {
        self.intersect(other).is_none()
    }

    fn check_for(&self, goods: usize) -> Result<(), DataError> {
        match self.indices.last() {
            Some(&i) if i >= goods => Err(DataError::InvalidSelection(format!(
                "good index {i} out of range for {goods} goods"
            ))),
            None => Err(DataError::InvalidSelection("empty selection".into())),
            _ => Ok(()),
        }
    }
}
