use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use expsub_core::frequency::{GammaSet, Theta};

/// Where the frequency sets come from: files, the `--rho/--theta` family
/// shorthand, or both (in which case they must agree).
#[derive(Args, Debug, Clone)]
pub struct SchemeArgs {
    /// Frequency set Γ as JSON.
    #[arg(long)]
    pub gamma: Option<PathBuf>,

    /// Reproduced subset Γ̃ as JSON; defaults to Γ.
    #[arg(long)]
    pub sub: Option<PathBuf>,

    /// Multiplicity of ±θ in the shorthand family Γ = Γ̃ = {(±θ, ρ)}.
    #[arg(long)]
    pub rho: Option<u32>,

    /// Frequency of the shorthand family: `1.5`, `i`, `2i`, `i2`, `0`.
    #[arg(long, value_parser = parse_theta, allow_hyphen_values = true)]
    pub theta: Option<Theta>,
}

pub fn parse_theta(s: &str) -> std::result::Result<Theta, String> {
    let t = s.trim();
    let imag = t.contains('i');
    let digits = t.replacen('i', "", 1);
    let value = if digits.is_empty() {
        1.0
    } else {
        digits.parse::<f64>().map_err(|e| format!("cannot read {s:?} as a frequency: {e}"))?
    };
    let theta = if imag { Theta::imag(value) } else { Theta::real(value) };
    theta.map_err(|e| e.to_string())
}

fn load(path: &PathBuf) -> Result<GammaSet> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    GammaSet::from_json(&text).with_context(|| format!("in {}", path.display()))
}

impl SchemeArgs {
    fn shorthand(&self) -> Result<Option<GammaSet>> {
        match (self.rho, self.theta) {
            (Some(rho), Some(theta)) => Ok(Some(GammaSet::family(theta, rho)?)),
            (None, None) => Ok(None),
            _ => bail!("--rho and --theta must be given together"),
        }
    }

    /// Resolves `(Γ, Γ̃)`.
    pub fn resolve(&self) -> Result<(GammaSet, GammaSet)> {
        let family = self.shorthand()?;
        let gamma = match (&self.gamma, &family) {
            (Some(p), Some(f)) => {
                let g = load(p)?;
                if &g != f {
                    bail!("structure error: --gamma {} disagrees with the --rho/--theta family {f}", p.display());
                }
                g
            }
            (Some(p), None) => load(p)?,
            (None, Some(f)) => f.clone(),
            (None, None) => bail!("give --gamma FILE or --rho R --theta T"),
        };
        let sub = match (&self.sub, &family) {
            (Some(p), Some(f)) => {
                let s = load(p)?;
                if &s != f {
                    bail!("structure error: --sub {} disagrees with the --rho/--theta family {f}", p.display());
                }
                s
            }
            (Some(p), None) => load(p)?,
            (None, _) => gamma.clone(),
        };
        gamma.check_subset(&sub)?;
        Ok((gamma, sub))
    }
}

/// Inclusive level range `a..b`, or a single level `k`.
pub fn parse_levels(s: &str) -> std::result::Result<(u32, u32), String> {
    let bad = |e: std::num::ParseIntError| format!("bad level range {s:?}: {e}");
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a.trim().parse().map_err(bad)?, b.trim_start_matches('=').trim().parse().map_err(bad)?),
        None => {
            let k = s.trim().parse().map_err(bad)?;
            (k, k)
        }
    };
    if a > b {
        return Err(format!("empty level range {s:?}"));
    }
    Ok((a, b))
}
