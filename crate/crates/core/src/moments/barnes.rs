use crate::error::{domain, Result};

const LN_2PI: f64 = 1.837_877_066_409_345_5;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `ζ(2), ζ(3), …, ζ(60)`.
#[allow(clippy::excessive_precision)]
const ZETA: [f64; 59] = [
    1.6449340668482264365,
    1.2020569031595942854,
    1.0823232337111381915,
    1.0369277551433699263,
    1.0173430619844491397,
    1.0083492773819228268,
    1.0040773561979443394,
    1.0020083928260822144,
    1.0009945751278180853,
    1.0004941886041194646,
    1.0002460865533080483,
    1.0001227133475784891,
    1.0000612481350587048,
    1.0000305882363070205,
    1.0000152822594086519,
    1.0000076371976378998,
    1.0000038172932649998,
    1.0000019082127165539,
    1.0000009539620338728,
    1.0000004769329867878,
    1.0000002384505027277,
    1.0000001192199259653,
    1.0000000596081890513,
    1.0000000298035035147,
    1.0000000149015548284,
    1.0000000074507117898,
    1.0000000037253340248,
    1.0000000018626597235,
    1.0000000009313274324,
    1.0000000004656629065,
    1.0000000002328311834,
    1.0000000001164155017,
    1.0000000000582077209,
    1.0000000000291038504,
    1.0000000000145519219,
    1.0000000000072759598,
    1.0000000000036379795,
    1.0000000000018189897,
    1.0000000000009094948,
    1.0000000000004547474,
    1.0000000000002273737,
    1.0000000000001136868,
    1.0000000000000568434,
    1.0000000000000284217,
    1.0000000000000142109,
    1.0000000000000071054,
    1.0000000000000035527,
    1.0000000000000017764,
    1.0000000000000008882,
    1.0000000000000004441,
    1.000000000000000222,
    1.000000000000000111,
    1.0000000000000000555,
    1.0000000000000000278,
    1.0000000000000000139,
    1.0000000000000000069,
    1.0000000000000000035,
    1.0000000000000000017,
    1.0000000000000000009,
];

/// `log G(1 + z)` by its Maclaurin series, `|z| <= 1/2`.
fn log_g_series(z: f64) -> f64 {
    let mut s = 0.5 * z * LN_2PI - 0.5 * (z + (1.0 + EULER_GAMMA) * z * z);
    let mut pow = z * z;
    for (i, zeta) in ZETA.iter().enumerate() {
        let k = i + 2;
        pow *= z;
        let term = zeta * pow / (k + 1) as f64;
        s += if k % 2 == 0 { term } else { -term };
    }
    s
}

/// Logarithm of the Barnes G-function for real `x > 0`.
pub fn barnes_g_log(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain(format!("log G needs a positive finite argument, got {x}")));
    }
    let mut y = x;
    let mut acc = 0.0;
    // G(y + 1) = Γ(y) G(y)
    while y > 1.5 {
        y -= 1.0;
        acc += libm::lgamma(y);
    }
    while y <= 0.5 {
        acc -= libm::lgamma(y);
        y += 1.0;
    }
    Ok(acc + log_g_series(y - 1.0))
}
