use crate::error::{Error, Result};

/// Self-inclusive order counts of a sample.
///
/// `r[i] = #{l : v_l <= v_i}` and `l[i] = #{l : v_l >= v_i}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankVector {
    pub r: Vec<u64>,
    pub l: Vec<u64>,
}

impl RankVector {
    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }
}

pub fn ranks(values: &[f64]) -> Result<RankVector> {
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut r = vec![0u64; n];
    let mut l = vec![0u64; n];
    let mut start = 0;
    while start < n {
        let v = values[order[start]];
        let mut end = start + 1;
        // -0.0 and 0.0 compare equal
        while end < n && values[order[end]] == v {
            end += 1;
        }
        for &i in &order[start..end] {
            r[i] = end as u64;
            l[i] = (n - start) as u64;
        }
        start = end;
    }
    Ok(RankVector { r, l })
}
