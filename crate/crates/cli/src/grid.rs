use pearceylab::{Error, Result};

/// Point-list specifications accepted by `--grid`.
///
/// * `diag:a:b:N`   N points `(x, x)` with x uniform on `[a, b]`
/// * `lin:a:b:N`    N values uniform on `[a, b]`; as pairs, the tensor grid
/// * `vals:x1,x2`   explicit values; as pairs, the tensor grid
/// * `pts:x1,y1;x2,y2` explicit pairs
#[derive(Clone, Debug, PartialEq)]
pub enum Grid {
    Diag(Vec<f64>),
    Values(Vec<f64>),
    Pairs(Vec<(f64, f64)>),
}

fn num(s: &str) -> Result<f64> {
    let v: f64 = s.trim().parse().map_err(|_| Error::Config(format!("grid: '{s}' is not a number")))?;
    if !v.is_finite() {
        return Err(Error::Config(format!("grid: '{s}' is not finite")));
    }
    Ok(v)
}

fn linspace(rest: &str) -> Result<Vec<f64>> {
    let f: Vec<&str> = rest.split(':').collect();
    if f.len() != 3 {
        return Err(Error::Config(format!("grid: expected a:b:N, got '{rest}'")));
    }
    let (a, b) = (num(f[0])?, num(f[1])?);
    let n: usize = f[2].trim().parse().map_err(|_| Error::Config(format!("grid: bad count '{}'", f[2])))?;
    match n {
        0 => Err(Error::Config("grid: count must be positive".into())),
        1 => Ok(vec![a]),
        _ => Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()),
    }
}

impl Grid {
    pub fn parse(spec: &str) -> Result<Self> {
        let (kind, rest) = spec
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("grid: expected kind:spec, got '{spec}'")))?;
        match kind {
            "diag" => Ok(Grid::Diag(linspace(rest)?)),
            "lin" => Ok(Grid::Values(linspace(rest)?)),
            "vals" => Ok(Grid::Values(rest.split(',').map(num).collect::<Result<_>>()?)),
            "pts" => {
                let pairs = rest
                    .split(';')
                    .map(|p| {
                        let (x, y) = p
                            .split_once(',')
                            .ok_or_else(|| Error::Config(format!("grid: pair '{p}' needs x,y")))?;
                        Ok((num(x)?, num(y)?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Grid::Pairs(pairs))
            }
            _ => Err(Error::Config(format!("grid: unknown kind '{kind}' (diag, lin, vals, pts)"))),
        }
    }

    pub fn pairs(&self) -> Vec<(f64, f64)> {
        match self {
            Grid::Diag(v) => v.iter().map(|&x| (x, x)).collect(),
            Grid::Values(v) => v.iter().flat_map(|&x| v.iter().map(move |&y| (x, y))).collect(),
            Grid::Pairs(p) => p.clone(),
        }
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        match self {
            Grid::Diag(v) | Grid::Values(v) => Ok(v.clone()),
            Grid::Pairs(_) => Err(Error::Config("this subcommand takes a 1-D grid (lin, vals or diag)".into())),
        }
    }
}
