//! Correlating community scores with external data and separating labelled groups.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::dimensions::ScoreTable;
use crate::stats;

#[derive(Debug, thiserror::Error)]
pub enum ValidationError {
    #[error("need at least {needed} matched rows, got {got}")]
    TooFewMatches { needed: usize, got: usize },
    #[error("zero variance in {0}")]
    ZeroVariance(&'static str),
    #[error("group {0} needs at least two members")]
    SmallGroup(char),
    #[error("pooled standard deviation is zero")]
    ZeroPooledSd,
    #[error("labels contain a single class")]
    SingleClass,
    #[error("{path}:{line}: {reason}")]
    BadTable {
        path: String,
        line: usize,
        reason: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// External value per community, many-to-one rows already averaged.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ExternalMeasure {
    pub values: BTreeMap<String, f64>,
    pub labels: BTreeMap<String, String>,
    /// Input rows per community before averaging.
    pub rows: BTreeMap<String, usize>,
}

impl ExternalMeasure {
    /// Averages repeated community rows; the last non-empty label wins.
    pub fn from_rows<I: IntoIterator<Item = (String, f64, Option<String>)>>(rows: I) -> Self {
        let mut acc: BTreeMap<String, (f64, usize)> = BTreeMap::new();
        let mut labels = BTreeMap::new();
        for (c, v, l) in rows {
            let e = acc.entry(c.clone()).or_default();
            e.0 += v;
            e.1 += 1;
            if let Some(l) = l.filter(|l| !l.is_empty()) {
                labels.insert(c, l);
            }
        }
        ExternalMeasure {
            values: acc
                .iter()
                .map(|(c, (s, n))| (c.clone(), s / *n as f64))
                .collect(),
            rows: acc.into_iter().map(|(c, (_, n))| (c, n)).collect(),
            labels,
        }
    }

    /// Reads `community_id,value[,label]` CSV with a required header row.
    pub fn load(path: &Path) -> Result<Self, ValidationError> {
        let bad = |line: usize, reason: String| ValidationError::BadTable {
            path: path.display().to_string(),
            line,
            reason,
        };
        let mut lines = BufReader::new(File::open(path)?).lines();
        let header = lines.next().transpose()?.unwrap_or_default();
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        if cols.first() != Some(&"community_id") || cols.get(1) != Some(&"value") || cols.len() > 3
        {
            return Err(bad(
                1,
                "expected header `community_id,value[,label]`".into(),
            ));
        }
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            if f.len() < 2 || f.len() > 3 {
                return Err(bad(
                    i + 2,
                    format!("expected 2 or 3 fields, got {}", f.len()),
                ));
            }
            let v: f64 = f[1]
                .parse()
                .map_err(|_| bad(i + 2, format!("bad value `{}`", f[1])))?;
            if !v.is_finite() {
                return Err(bad(i + 2, format!("non-finite value `{}`", f[1])));
            }
            rows.push((f[0].to_string(), v, f.get(2).map(|s| s.to_string())));
        }
        Ok(Self::from_rows(rows))
    }

    /// `(score z, external value)` for communities present in both, plus the unmatched ids.
    pub fn matched(&self, scores: &ScoreTable) -> (Vec<(String, f64, f64)>, Vec<String>) {
        let index = scores.index();
        let mut hits = Vec::new();
        let mut misses = Vec::new();
        for (c, &v) in &self.values {
            match index.get(c.as_str()) {
                Some(&i) => hits.push((c.clone(), scores.z[i], v)),
                None => misses.push(c.clone()),
            }
        }
        (hits, misses)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub r: f64,
    /// Two-sided, from Student's t with `n − 2` degrees of freedom.
    pub p: f64,
    pub n: usize,
}

/// Two-sided p-value of a Pearson correlation.
pub fn correlation_p_value(r: f64, n: usize) -> f64 {
    if r.abs() >= 1.0 {
        return 0.0;
    }
    let df = (n - 2) as f64;
    let t = r * (df / (1.0 - r * r)).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
    (2.0 * dist.sf(t.abs())).min(1.0)
}

pub fn pearson_test(xs: &[f64], ys: &[f64]) -> Result<Correlation, ValidationError> {
    let n = xs.len();
    if n < 3 {
        return Err(ValidationError::TooFewMatches { needed: 3, got: n });
    }
    for (v, name) in [(xs, "scores"), (ys, "external values")] {
        if stats::population_sd(v).is_none_or(|s| s == 0.0) {
            return Err(ValidationError::ZeroVariance(name));
        }
    }
    let r = stats::pearson(xs, ys).ok_or(ValidationError::ZeroVariance("scores"))?;
    Ok(Correlation {
        r,
        p: correlation_p_value(r, n),
        n,
    })
}

/// Pearson r between community z-scores and an external measure over matched communities.
pub fn correlate(
    scores: &ScoreTable,
    measure: &ExternalMeasure,
) -> Result<Correlation, ValidationError> {
    let (hits, _) = measure.matched(scores);
    let (xs, ys): (Vec<f64>, Vec<f64>) = hits.into_iter().map(|(_, x, y)| (x, y)).unzip();
    pearson_test(&xs, &ys)
}

/// `(mean_a − mean_b) / pooled SD`, pooling sample variances with `n − 1` weights.
pub fn cohens_d(a: &[f64], b: &[f64]) -> Result<f64, ValidationError> {
    if a.len() < 2 {
        return Err(ValidationError::SmallGroup('a'));
    }
    if b.len() < 2 {
        return Err(ValidationError::SmallGroup('b'));
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let va = stats::sample_variance(a).expect("two or more values");
    let vb = stats::sample_variance(b).expect("two or more values");
    let pooled = (((na - 1.0) * va + (nb - 1.0) * vb) / (na + nb - 2.0)).sqrt();
    if pooled == 0.0 {
        return Err(ValidationError::ZeroPooledSd);
    }
    let (ma, mb) = (
        stats::mean(a).expect("non-empty"),
        stats::mean(b).expect("non-empty"),
    );
    Ok((ma - mb) / pooled)
}

/// Cohen's d between two groups of communities by z-score.
pub fn cohens_d_groups(
    scores: &ScoreTable,
    group_a: &[&str],
    group_b: &[&str],
) -> Result<f64, ValidationError> {
    let index = scores.index();
    let pick = |g: &[&str]| -> Vec<f64> {
        g.iter()
            .filter_map(|c| index.get(c).map(|&i| scores.z[i]))
            .collect()
    };
    cohens_d(&pick(group_a), &pick(group_b))
}

/// Pearson r between values and 0/1 labels.
pub fn point_biserial(values: &[f64], labels: &[bool]) -> Result<f64, ValidationError> {
    assert_eq!(values.len(), labels.len(), "one label per value");
    let ones = labels.iter().filter(|&&l| l).count();
    if ones == 0 || ones == labels.len() {
        return Err(ValidationError::SingleClass);
    }
    let ys: Vec<f64> = labels.iter().map(|&l| if l { 1.0 } else { 0.0 }).collect();
    stats::pearson(values, &ys).ok_or(ValidationError::ZeroVariance("scores"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn correlation_identities() {
        let x = [0.3, 1.2, -0.7, 2.2, 0.0];
        let r = pearson_test(&x, &x).unwrap();
        assert!((r.r - 1.0).abs() < 1e-15 && r.p < 1e-12);
        let affine: Vec<f64> = x.iter().map(|v| 3.0 * v - 1.0).collect();
        assert!((pearson_test(&x, &affine).unwrap().r - 1.0).abs() < 1e-12);
        let neg: Vec<f64> = x.iter().map(|v| -2.0 * v).collect();
        assert!((pearson_test(&x, &neg).unwrap().r + 1.0).abs() < 1e-12);
        assert!(pearson_test(&x[..2], &x[..2]).is_err());
        assert!(matches!(
            pearson_test(&x, &[1.0; 5]),
            Err(ValidationError::ZeroVariance(_))
        ));
    }

    #[test]
    fn four_point_case_against_closed_form() {
        let (x, y) = ([0.0, 1.0, 2.0, 3.0], [0.0, 1.0, 2.0, 2.5]);
        // sxy = 4.25, sxx = 5, syy = 3.6875
        let want = 4.25 / (5.0f64 * 3.6875).sqrt();
        let c = pearson_test(&x, &y).unwrap();
        assert!((c.r - want).abs() < 1e-12);
        // with 2 degrees of freedom the t tail has the closed form 1 − t / sqrt(t² + 2)
        let t = want * (2.0 / (1.0 - want * want)).sqrt();
        assert!((c.p - (1.0 - t / (t * t + 2.0).sqrt())).abs() < 1e-12);
    }

    #[test]
    fn cohens_d_cases() {
        assert_eq!(cohens_d(&[1.0, 2.0, 3.0], &[3.0, 4.0, 5.0]).unwrap(), -2.0);
        assert_eq!(cohens_d(&[3.0, 4.0, 5.0], &[1.0, 2.0, 3.0]).unwrap(), 2.0);
        assert_eq!(cohens_d(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert!(matches!(
            cohens_d(&[0.0, 0.0], &[1.0, 1.0]),
            Err(ValidationError::ZeroPooledSd)
        ));
        assert!(matches!(
            cohens_d(&[0.0], &[1.0, 1.0]),
            Err(ValidationError::SmallGroup('a'))
        ));
    }

    #[test]
    fn point_biserial_cases() {
        assert!(
            (point_biserial(&[0.0, 0.0, 1.0, 1.0], &[false, false, true, true]).unwrap() - 1.0)
                .abs()
                < 1e-15
        );
        let r = point_biserial(&[1.0, 2.0, 1.0, 2.0], &[true, true, false, false]).unwrap();
        assert!(r.abs() < 1e-15);
        assert!(matches!(
            point_biserial(&[1.0, 2.0], &[true, true]),
            Err(ValidationError::SingleClass)
        ));
    }

    #[test]
    fn measure_csv_averages_repeats() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.csv");
        std::fs::write(
            &p,
            "community_id,value,label\nnyc,0.4,city\nnyc,0.6,city\nmit,0.1,\n",
        )
        .unwrap();
        let m = ExternalMeasure::load(&p).unwrap();
        assert_eq!(m.values["nyc"], 0.5);
        assert_eq!(m.rows["nyc"], 2);
        assert_eq!(m.labels.get("mit"), None);
        std::fs::write(&p, "nyc,0.4\n").unwrap();
        assert!(ExternalMeasure::load(&p).is_err());
    }
}
