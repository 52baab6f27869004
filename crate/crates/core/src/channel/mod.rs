//! Spot-beam channel: antenna pattern, location and weather attenuation,
//! receiver populations.

mod beam;
mod bessel;
mod population;
mod weather;

pub use beam::{
    angle_for_attenuation, location_attenuation_cdf, pattern_attenuation, BeamConfig, SpotBeam,
    GEOSTATIONARY_ALTITUDE_M,
};
pub use bessel::{bessel_j1, J1_FIRST_ZERO};
pub use population::{
    generate_population, read_population_csv, terminal_counts, write_population_csv, Receiver,
    TerminalClass, PROFESSIONAL_OFFSET_DB,
};
pub use weather::{sample_weather, WeatherCdf};
