//! Counter-based random bits: every site color is a pure function of
//! (seed, trial, site coordinate), so any trial can be regenerated in
//! isolation and trials can be split across workers with no shared state.

#[inline(always)]
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

/// 64 mixed bits for the counter (seed, trial, i, j).
#[inline(always)]
pub fn mix(seed: u64, trial: u64, i: i32, j: i32) -> u64 {
    let coord = ((i as u32 as u64) << 32) | (j as u32 as u64);
    let h = splitmix64(seed ^ splitmix64(trial ^ splitmix64(coord)));
    splitmix64(h)
}

/// Fair coin for one site: true = open (yellow), false = closed (blue).
#[inline(always)]
pub fn site_open(seed: u64, trial: u64, i: i32, j: i32) -> bool {
    mix(seed, trial, i, j) & 1 == 1
}

/// Derives a per-experiment-point seed so scale points draw independent streams.
pub fn point_seed(seed: u64, point_index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(0x706f696e74 ^ point_index))
}
