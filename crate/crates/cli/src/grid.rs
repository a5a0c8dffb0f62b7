use affine_cf::symbol::AffineModel;
use affine_cf::{Error, Result};

/// Values of one axis: `min:max:count` (endpoints included), `a,b,c`, or `v`.
pub fn parse_axis(spec: &str) -> Result<Vec<f64>> {
    let bad = |why: &str| Error::Contract(format!("bad grid spec `{spec}`: {why}"));
    let num = |s: &str| -> Result<f64> {
        let v: f64 = s
            .trim()
            .parse()
            .map_err(|_| bad(&format!("`{}` is not a number", s.trim())))?;
        if !v.is_finite() {
            return Err(bad("values must be finite"));
        }
        Ok(v)
    };
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.len() {
        1 => spec.split(',').map(num).collect(),
        3 => {
            let (lo, hi) = (num(parts[0])?, num(parts[1])?);
            let n: usize = parts[2]
                .trim()
                .parse()
                .map_err(|_| bad("count must be a positive integer"))?;
            if n == 0 {
                return Err(bad("count must be at least 1"));
            }
            if n == 1 {
                if lo != hi {
                    return Err(bad("a single point needs min = max"));
                }
                return Ok(vec![lo]);
            }
            let step = (hi - lo) / (n - 1) as f64;
            Ok((0..n)
                .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
                .collect())
        }
        _ => Err(bad(
            "expected `min:max:count`, a comma list or a single value",
        )),
    }
}

fn product(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    axes.iter().fold(vec![Vec::new()], |acc, axis| {
        acc.iter()
            .flat_map(|prefix| {
                axis.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect()
    })
}

/// One evaluation point.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub t: f64,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
}

/// Points in `t`-major, then `x`, then `u` order.
pub fn build_grid(model: &AffineModel, t: &str, x: &[String], u: &[String]) -> Result<Vec<Point>> {
    let d = model.dim();
    if x.len() > d || u.len() > d {
        return Err(Error::Contract(format!(
            "model has dimension {d}, got {} x axes and {} u axes",
            x.len(),
            u.len()
        )));
    }
    let ts = parse_axis(t)?;
    if ts.iter().any(|&v| v < 0.0) {
        return Err(Error::Contract("times must be nonnegative".into()));
    }
    let bounds = model.domain_bounds();
    let mut x_axes = x
        .iter()
        .map(|s| parse_axis(s))
        .collect::<Result<Vec<_>>>()?;
    for &(lo, hi) in &bounds[x_axes.len()..] {
        x_axes.push(vec![0.0f64.clamp(lo, hi)]);
    }
    let mut u_axes = u
        .iter()
        .map(|s| parse_axis(s))
        .collect::<Result<Vec<_>>>()?;
    u_axes.resize(d, vec![0.0]);
    let xs = product(&x_axes);
    let us = product(&u_axes);
    let mut out = Vec::with_capacity(ts.len() * xs.len() * us.len());
    for &t in &ts {
        for x in &xs {
            for u in &us {
                out.push(Point {
                    t,
                    x: x.clone(),
                    u: u.clone(),
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_forms() {
        assert_eq!(parse_axis("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_axis("0.1, 0.5,1").unwrap(), vec![0.1, 0.5, 1.0]);
        assert_eq!(parse_axis("-2").unwrap(), vec![-2.0]);
        assert_eq!(parse_axis("-3:3:21").unwrap()[20], 3.0);
        assert!(parse_axis("0:1:0").is_err());
        assert!(parse_axis("a").is_err());
        assert!(parse_axis("0:1").is_err());
    }

    #[test]
    fn order_is_t_then_x_then_u() {
        let mut m = AffineModel::zero(2);
        m.state_domain = vec![[None, None], [Some(0.5), None]];
        let g = build_grid(&m, "1,2", &["0,1".into()], &["3,4".into()]).unwrap();
        assert_eq!(g.len(), 8);
        assert_eq!(
            g[0],
            Point {
                t: 1.0,
                x: vec![0.0, 0.5],
                u: vec![3.0, 0.0]
            }
        );
        assert_eq!(g[1].u, vec![4.0, 0.0]);
        assert_eq!(g[2].x, vec![1.0, 0.5]);
        assert_eq!(g[4].t, 2.0);
    }
}
