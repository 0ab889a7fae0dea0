//! Independent ground truth for the closed forms: Smith normal form over
//! the integers, abelianisations of finitely presented groups, and an
//! explicit regular-representation check of triangle-group abelianisations.
//!
//! Nothing here knows about the formulas it is used to check.

use std::fmt;
use std::ops::Index;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::Scalar;
use crate::error::{Error, Result};
use crate::signature::FuchsianSignature;
use crate::triangle::{self, TriangleParams};

/// Dense row-major integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> IntegerMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        m
    }

    /// Builds a matrix from rows; `cols` fixes the width when `rows` is empty.
    pub fn from_rows(cols: usize, rows: Vec<Vec<T>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(Error::InvalidArgument(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            data.extend(row);
        }
        Ok(IntegerMatrix {
            rows: n,
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn set(&mut self, i: usize, j: usize, value: T) {
        self.data[i * self.cols + j] = value;
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::InvalidArgument(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] = fma(&out.data[idx], a, &other[(k, j)])?;
                }
            }
        }
        Ok(out)
    }

    /// `row * self` for a row vector.
    pub fn left_apply(&self, row: &[T]) -> Result<Vec<T>> {
        debug_assert_eq!(row.len(), self.rows);
        let mut out = vec![T::zero(); self.cols];
        for (k, a) in row.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, slot) in out.iter_mut().enumerate() {
                *slot = fma(slot, a, &self[(k, j)])?;
            }
        }
        Ok(out)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[target] += factor * row[source]
    fn add_row(&mut self, target: usize, source: usize, factor: &T) -> Result<()> {
        for j in 0..self.cols {
            let s = self.data[source * self.cols + j].clone();
            let idx = target * self.cols + j;
            self.data[idx] = fma(&self.data[idx], factor, &s)?;
        }
        Ok(())
    }

    /// col[target] += factor * col[source]
    fn add_col(&mut self, target: usize, source: usize, factor: &T) -> Result<()> {
        for i in 0..self.rows {
            let s = self.data[i * self.cols + source].clone();
            let idx = i * self.cols + target;
            self.data[idx] = fma(&self.data[idx], factor, &s)?;
        }
        Ok(())
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let idx = i * self.cols + j;
            self.data[idx] = -self.data[idx].clone();
        }
    }
}

impl<T> Index<(usize, usize)> for IntegerMatrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T: fmt::Display> fmt::Display for IntegerMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| self.data[i * self.cols + j].to_string())
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

fn fma<T: Scalar>(acc: &T, a: &T, b: &T) -> Result<T> {
    a.checked_mul(b)
        .and_then(|p| acc.checked_add(&p))
        .ok_or(Error::Overflow("integer matrix arithmetic"))
}

/// Smith normal form `left * M * right = diag(d_1, d_2, ...)` with
/// `d_1 | d_2 | ...`, non-negative, zeros trailing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult<T> {
    diagonal: Vec<T>,
    rank: usize,
    transforms: Option<(IntegerMatrix<T>, IntegerMatrix<T>)>,
}

impl<T: Scalar> SnfResult<T> {
    /// Diagonal of length `min(rows, cols)`, zeros included.
    pub fn diagonal(&self) -> &[T] {
        &self.diagonal
    }

    /// Non-zero diagonal entries (units included).
    pub fn invariant_factors(&self) -> &[T] {
        &self.diagonal[..self.rank]
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn left(&self) -> Option<&IntegerMatrix<T>> {
        self.transforms.as_ref().map(|t| &t.0)
    }

    pub fn right(&self) -> Option<&IntegerMatrix<T>> {
        self.transforms.as_ref().map(|t| &t.1)
    }
}

pub fn snf<T: Scalar>(m: &IntegerMatrix<T>) -> Result<SnfResult<T>> {
    snf_impl(m, false)
}

pub fn snf_with_transforms<T: Scalar>(m: &IntegerMatrix<T>) -> Result<SnfResult<T>> {
    snf_impl(m, true)
}

fn snf_impl<T: Scalar>(m: &IntegerMatrix<T>, track: bool) -> Result<SnfResult<T>> {
    let (rows, cols) = (m.rows, m.cols);
    let mut a = m.clone();
    let mut left = track.then(|| IntegerMatrix::identity(rows));
    let mut right = track.then(|| IntegerMatrix::identity(cols));

    macro_rules! row_op {
        (swap $x:expr, $y:expr) => {{
            a.swap_rows($x, $y);
            if let Some(u) = left.as_mut() {
                u.swap_rows($x, $y);
            }
        }};
        (add $t:expr, $s:expr, $f:expr) => {{
            a.add_row($t, $s, $f)?;
            if let Some(u) = left.as_mut() {
                u.add_row($t, $s, $f)?;
            }
        }};
    }
    macro_rules! col_op {
        (swap $x:expr, $y:expr) => {{
            a.swap_cols($x, $y);
            if let Some(v) = right.as_mut() {
                v.swap_cols($x, $y);
            }
        }};
        (add $t:expr, $s:expr, $f:expr) => {{
            a.add_col($t, $s, $f)?;
            if let Some(v) = right.as_mut() {
                v.add_col($t, $s, $f)?;
            }
        }};
    }

    let steps = rows.min(cols);
    let mut rank = 0;
    for t in 0..steps {
        // smallest non-zero entry of the trailing block becomes the pivot
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                let x = &a[(i, j)];
                if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < a[(bi, bj)].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        row_op!(swap t, pi);
        col_op!(swap t, pj);

        loop {
            let mut residue = false;
            for i in t + 1..rows {
                if !a[(i, t)].is_zero() {
                    let q = -(a[(i, t)].clone() / a[(t, t)].clone());
                    row_op!(add i, t, &q);
                    residue |= !a[(i, t)].is_zero();
                }
            }
            for j in t + 1..cols {
                if !a[(t, j)].is_zero() {
                    let q = -(a[(t, j)].clone() / a[(t, t)].clone());
                    col_op!(add j, t, &q);
                    residue |= !a[(t, j)].is_zero();
                }
            }
            if residue {
                let mut best = (t, t, a[(t, t)].abs());
                for i in t + 1..rows {
                    let x = a[(i, t)].abs();
                    if !x.is_zero() && x < best.2 {
                        best = (i, t, x);
                    }
                }
                for j in t + 1..cols {
                    let x = a[(t, j)].abs();
                    if !x.is_zero() && x < best.2 {
                        best = (t, j, x);
                    }
                }
                row_op!(swap t, best.0);
                col_op!(swap t, best.1);
                continue;
            }
            let pivot = a[(t, t)].clone();
            let offender =
                (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a[(i, j)].is_multiple_of(&pivot)));
            match offender {
                Some(i) => row_op!(add t, i, &T::one()),
                None => break,
            }
        }
        if a[(t, t)].is_negative() {
            a.negate_row(t);
            if let Some(u) = left.as_mut() {
                u.negate_row(t);
            }
        }
        rank = t + 1;
    }

    let diagonal = (0..steps).map(|i| a[(i, i)].clone()).collect();
    Ok(SnfResult {
        diagonal,
        rank,
        transforms: left.zip(right),
    })
}

/// Order of an element of a finitely generated abelian group.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ImageOrder<T> {
    Finite(T),
    Infinite,
}

impl<T: fmt::Display> fmt::Display for ImageOrder<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ImageOrder::Finite(n) => write!(f, "{n}"),
            ImageOrder::Infinite => f.write_str("inf"),
        }
    }
}

/// Abelianisation of `<g_1, ..., g_n | relations>`, the cokernel of the
/// relation matrix.
#[derive(Clone, Debug)]
pub struct FpAbelianisation<T> {
    generator_count: usize,
    /// Generator index to column of the reduced matrix; `None` for
    /// generators that occur in no relation.
    columns: Vec<Option<usize>>,
    snf: SnfResult<T>,
    invariant_factors: Vec<T>,
    free_rank: usize,
    image_orders: Vec<ImageOrder<T>>,
}

impl<T: Scalar> FpAbelianisation<T> {
    /// Non-trivial invariant factors `d_1 | d_2 | ...`, all `>= 2`.
    pub fn invariant_factors(&self) -> &[T] {
        &self.invariant_factors
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    /// Order of the image of each generator.
    pub fn image_orders(&self) -> &[ImageOrder<T>] {
        &self.image_orders
    }

    pub fn generator_count(&self) -> usize {
        self.generator_count
    }

    /// Torsion order; `None` when the group is infinite.
    pub fn finite_order(&self) -> Option<T> {
        (self.free_rank == 0).then(|| {
            self.invariant_factors
                .iter()
                .fold(T::one(), |acc, d| acc * d.clone())
        })
    }

    fn reduced_coordinates(&self, v: &[T]) -> Result<Option<Vec<T>>> {
        if v.len() != self.generator_count {
            return Err(Error::InvalidArgument(format!(
                "vector of length {} for {} generators",
                v.len(),
                self.generator_count
            )));
        }
        let width = self.snf.right().map_or(0, |r| r.rows());
        let mut reduced = vec![T::zero(); width];
        for (x, col) in v.iter().zip(&self.columns) {
            match col {
                Some(c) => reduced[*c] = x.clone(),
                None if !x.is_zero() => return Ok(None),
                None => {}
            }
        }
        let right = self.snf.right().expect("transforms tracked");
        Ok(Some(right.left_apply(&reduced)?))
    }

    /// Least `k >= 1` with `k v` in the relation lattice.
    pub fn element_order(&self, v: &[T]) -> Result<ImageOrder<T>> {
        let Some(w) = self.reduced_coordinates(v)? else {
            return Ok(ImageOrder::Infinite);
        };
        let diag = self.snf.diagonal();
        let mut order = T::one();
        for (i, wi) in w.iter().enumerate() {
            let d = diag.get(i).cloned().unwrap_or_else(T::zero);
            if d.is_zero() {
                if !wi.is_zero() {
                    return Ok(ImageOrder::Infinite);
                }
            } else {
                let part = d.clone() / d.gcd(wi);
                order = order.lcm(&part);
            }
        }
        Ok(ImageOrder::Finite(order))
    }

    /// Coordinates of `v` in the torsion part `C_{d_1} x C_{d_2} x ...`
    /// (one entry per non-trivial invariant factor, reduced into `0..d`).
    /// `None` when `v` has infinite order.
    pub fn torsion_coordinates(&self, v: &[T]) -> Result<Option<Vec<T>>> {
        let Some(w) = self.reduced_coordinates(v)? else {
            return Ok(None);
        };
        let diag = self.snf.diagonal();
        let mut out = Vec::new();
        for (i, wi) in w.iter().enumerate() {
            let d = diag.get(i).cloned().unwrap_or_else(T::zero);
            if d.is_zero() {
                if !wi.is_zero() {
                    return Ok(None);
                }
            } else if !d.is_one() {
                out.push(wi.mod_floor(&d));
            }
        }
        Ok(Some(out))
    }
}

pub fn fp_abelianisation<T: Scalar>(
    generator_count: usize,
    relations: &[Vec<T>],
) -> Result<FpAbelianisation<T>> {
    for (i, row) in relations.iter().enumerate() {
        if row.len() != generator_count {
            return Err(Error::InvalidArgument(format!(
                "relation {i} has {} entries for {generator_count} generators",
                row.len()
            )));
        }
    }
    // generators absent from every relation are free and need no elimination
    let mut columns = vec![None; generator_count];
    let mut kept = Vec::new();
    for (g, slot) in columns.iter_mut().enumerate() {
        if relations.iter().any(|row| !row[g].is_zero()) {
            *slot = Some(kept.len());
            kept.push(g);
        }
    }
    let rows: Vec<Vec<T>> = relations
        .iter()
        .filter(|row| row.iter().any(|x| !x.is_zero()))
        .map(|row| kept.iter().map(|&g| row[g].clone()).collect())
        .collect();
    let matrix = IntegerMatrix::from_rows(kept.len(), rows)?;
    let snf = snf_with_transforms(&matrix)?;

    let invariant_factors: Vec<T> = snf
        .invariant_factors()
        .iter()
        .filter(|d| !d.is_one())
        .cloned()
        .collect();
    let free_rank = (generator_count - kept.len()) + (kept.len() - snf.rank());
    let mut out = FpAbelianisation {
        generator_count,
        columns,
        snf,
        invariant_factors,
        free_rank,
        image_orders: Vec::new(),
    };
    let mut unit = vec![T::zero(); generator_count];
    let mut orders = Vec::with_capacity(generator_count);
    for g in 0..generator_count {
        unit[g] = T::one();
        orders.push(out.element_order(&unit)?);
        unit[g] = T::zero();
    }
    out.image_orders = orders;
    Ok(out)
}

/// Relations of `<x_1, x_2 | x_1^p, x_2^q, (x_1 x_2)^r>` in additive form.
pub fn triangle_relations<T: Scalar>(t: &TriangleParams) -> Result<Vec<Vec<T>>> {
    let conv = |n: u64| T::from_u64(n).ok_or(Error::Overflow("triangle parameter"));
    let (p, q, r) = (conv(t.p())?, conv(t.q())?, conv(t.r())?);
    Ok(vec![
        vec![p, T::zero()],
        vec![T::zero(), q],
        vec![r.clone(), r],
    ])
}

/// The additive relation lattice of a signature's standard presentation.
///
/// Generators are the `2g` hyperbolic generators followed by every elliptic
/// generator, classes in ascending period order. Commutators vanish, so the
/// hyperbolic generators appear in no relation.
#[derive(Clone, Debug)]
pub struct SignatureEncoding<T> {
    pub hyperbolic: usize,
    /// Period of each elliptic generator.
    pub elliptic_periods: Vec<u64>,
    pub relations: Vec<Vec<T>>,
}

impl<T> SignatureEncoding<T> {
    pub fn generator_count(&self) -> usize {
        self.hyperbolic + self.elliptic_periods.len()
    }
}

/// Hard cap on explicitly expanded generators.
pub const MAX_EXPLICIT_GENERATORS: usize = 20_000;

pub fn signature_relations<T: Scalar>(
    sig: &FuchsianSignature,
    modulus: Option<u64>,
) -> Result<SignatureEncoding<T>> {
    let too_big = || Error::InvalidArgument(format!("{sig} is too large to expand explicitly"));
    let hyperbolic = sig
        .genus()
        .to_usize()
        .and_then(|g| g.checked_mul(2))
        .ok_or_else(too_big)?;
    let mut elliptic_periods = Vec::new();
    for (m, n) in sig.classes() {
        let n = n.to_usize().ok_or_else(too_big)?;
        if elliptic_periods.len() + n + hyperbolic > MAX_EXPLICIT_GENERATORS {
            return Err(too_big());
        }
        elliptic_periods.extend(std::iter::repeat_n(m, n));
    }
    if hyperbolic + elliptic_periods.len() > MAX_EXPLICIT_GENERATORS {
        return Err(too_big());
    }
    let total = hyperbolic + elliptic_periods.len();
    let conv = |n: u64| T::from_u64(n).ok_or(Error::Overflow("signature period"));
    let mut relations = Vec::new();
    for (k, &m) in elliptic_periods.iter().enumerate() {
        let mut row = vec![T::zero(); total];
        row[hyperbolic + k] = conv(m)?;
        relations.push(row);
    }
    if !elliptic_periods.is_empty() {
        let mut row = vec![T::zero(); total];
        for x in &mut row[hyperbolic..] {
            *x = T::one();
        }
        relations.push(row);
    }
    if let Some(m) = modulus {
        let m = conv(m)?;
        for g in 0..total {
            let mut row = vec![T::zero(); total];
            row[g] = m.clone();
            relations.push(row);
        }
    }
    Ok(SignatureEncoding {
        hyperbolic,
        elliptic_periods,
        relations,
    })
}

/// Outcome of [`cycle_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleCheck {
    /// Degree of the regular representation, `|G/G'|`.
    pub degree: u64,
    /// Orders of the permutations induced by `x_1, x_2, x_3`.
    pub image_orders: [u64; 3],
    /// Number of cycles of each of those permutations.
    pub cycle_counts: [u64; 3],
}

/// Largest abelianisation the explicit check will enumerate.
pub const MAX_CYCLE_CHECK_DEGREE: u64 = 1 << 24;

/// Builds `G/G'` of a triangle group from the relation lattice, lets
/// `x_1, x_2, x_3 = (x_1 x_2)^{-1}` act on it by translation, and checks
/// the resulting semi-regular permutations against the closed forms of
/// [`triangle::abelianisation`].
pub fn cycle_check(t: &TriangleParams) -> Result<CycleCheck> {
    let fp = fp_abelianisation::<BigInt>(2, &triangle_relations(t)?)?;
    if fp.free_rank() != 0 {
        return Err(Error::mismatch(
            "abelianisation free rank",
            0,
            fp.free_rank(),
        ));
    }
    let moduli: Vec<u64> = fp
        .invariant_factors()
        .iter()
        .map(|d| d.to_u64().ok_or(Error::Overflow("invariant factor")))
        .collect::<Result<_>>()?;
    let degree = moduli
        .iter()
        .try_fold(1u64, |acc, &d| acc.checked_mul(d))
        .filter(|&n| n <= MAX_CYCLE_CHECK_DEGREE)
        .ok_or_else(|| {
            Error::InvalidArgument(format!("abelianisation of {t} too large to enumerate"))
        })?;

    let generators = [
        vec![BigInt::one(), BigInt::zero()],
        vec![BigInt::zero(), BigInt::one()],
        vec![-BigInt::one(), -BigInt::one()],
    ];
    let mut image_orders = [0u64; 3];
    let mut cycle_counts = [0u64; 3];
    for (k, g) in generators.iter().enumerate() {
        let shift: Vec<u64> = fp
            .torsion_coordinates(g)?
            .ok_or_else(|| Error::mismatch("generator image", "finite order", "infinite order"))?
            .iter()
            .map(|c| c.to_u64().expect("reduced coordinate"))
            .collect();
        let (length, count) = translation_cycles(&moduli, &shift, degree)?;
        image_orders[k] = length;
        cycle_counts[k] = count;
        let fp_order = match fp.element_order(g)? {
            ImageOrder::Finite(n) => n.to_u64().unwrap_or(0),
            ImageOrder::Infinite => 0,
        };
        if fp_order != length {
            return Err(Error::mismatch(
                format!("lattice order of x_{}", k + 1),
                fp_order,
                length,
            ));
        }
    }

    let closed = triangle::abelianisation(t);
    if closed.order != degree.into() {
        return Err(Error::mismatch(
            format!("|G/G'| for {t}"),
            &closed.order,
            degree,
        ));
    }
    if closed.image_orders != image_orders {
        return Err(Error::mismatch(
            format!("image orders for {t}"),
            format!("{:?}", closed.image_orders),
            format!("{image_orders:?}"),
        ));
    }
    if closed.invariant_factors != moduli {
        return Err(Error::mismatch(
            format!("invariant factors for {t}"),
            format!("{:?}", closed.invariant_factors),
            format!("{moduli:?}"),
        ));
    }
    for k in 0..3 {
        if cycle_counts[k] * image_orders[k] != degree {
            return Err(Error::mismatch(
                format!("cycle count of x_{}", k + 1),
                degree / image_orders[k],
                cycle_counts[k],
            ));
        }
    }
    Ok(CycleCheck {
        degree,
        image_orders,
        cycle_counts,
    })
}

/// Cycle structure of `x -> x + shift` on `Z/moduli[0] x Z/moduli[1] x ...`.
/// Returns the common cycle length and the cycle count; errors if the
/// permutation is not semi-regular.
fn translation_cycles(moduli: &[u64], shift: &[u64], degree: u64) -> Result<(u64, u64)> {
    let encode = |v: &[u64]| v.iter().zip(moduli).fold(0u64, |acc, (&x, &d)| acc * d + x);
    let mut seen = vec![false; degree as usize];
    let mut lengths = Vec::new();
    let mut point = vec![0u64; moduli.len()];
    for start in 0..degree {
        if seen[start as usize] {
            continue;
        }
        // decode start
        let mut rest = start;
        for (slot, &d) in point.iter_mut().zip(moduli).rev() {
            *slot = rest % d;
            rest /= d;
        }
        let mut length = 0u64;
        loop {
            let code = encode(&point);
            if seen[code as usize] {
                break;
            }
            seen[code as usize] = true;
            length += 1;
            for ((x, &s), &d) in point.iter_mut().zip(shift).zip(moduli) {
                *x = (*x + s) % d;
            }
        }
        lengths.push(length);
    }
    let first = lengths[0];
    if lengths.iter().any(|&l| l != first) {
        return Err(Error::mismatch(
            "semi-regularity",
            "equal cycle lengths",
            format!("{lengths:?}"),
        ));
    }
    Ok((first, lengths.len() as u64))
}
