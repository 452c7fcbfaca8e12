//! Process exit codes.

use numrange_core::Error;

use crate::commands::CheckFailure;
use crate::matrix_file::ParseError;

pub const OK: u8 = 0;
pub const OTHER: u8 = 1;
pub const PARSE: u8 = 2;
pub const CHECK_FAILED: u8 = 3;
pub const NOTHING_TO_STEER: u8 = 4;
pub const TRACKING_COLLISION: u8 = 5;

/// Exit code for an error chain; the first recognized cause wins.
pub fn code_for(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<ParseError>() {
            return PARSE;
        }
        if cause.is::<CheckFailure>() {
            return CHECK_FAILED;
        }
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::NothingToSteer => NOTHING_TO_STEER,
                Error::TrackingCollision { .. } => TRACKING_COLLISION,
                Error::NotSquare { .. }
                | Error::NonFinite { .. }
                | Error::NotUnitary { .. }
                | Error::NotHermitian { .. }
                | Error::DimensionMismatch { .. }
                | Error::InvalidExponent(_)
                | Error::InvalidProbability(_)
                | Error::InvalidArgument(_) => PARSE,
                _ => OTHER,
            };
        }
    }
    OTHER
}
