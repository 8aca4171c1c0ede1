use super::impedance::ImpedanceModel;
use crate::{invalid, Result};

/// One line of a one-sided spectrum: frequency and the mean-square current
/// it carries (A^2). The lines of a signal sum to its mean square.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralLine {
    pub frequency: f64,
    pub mean_square: f64,
}

/// Average power `sum |I_k|^2 Re Z(f_k)`.
///
/// The DC line (and anything below `resolution`) is weighted with
/// `Re Z(resolution)`: a record of finite length can't resolve slower
/// content, and the diffusion term diverges at zero frequency.
pub fn spectral_loss<M, I>(model: &M, resolution: f64, lines: I) -> Result<f64>
where
    M: ImpedanceModel + ?Sized,
    I: IntoIterator<Item = SpectralLine>,
{
    if !(resolution > 0.0) {
        return Err(invalid("resolution", "must be positive"));
    }
    let mut total = 0.0;
    for line in lines {
        if line.mean_square == 0.0 {
            continue;
        }
        let f = line.frequency.max(resolution);
        total += line.mean_square * model.impedance(f)?.re;
    }
    Ok(total)
}
