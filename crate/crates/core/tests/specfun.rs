#![allow(clippy::excessive_precision)]

//! Gamma accuracy against high-precision reference values and the
//! coefficient identities of the generalized binomial.

use fracleib::specfun::{gamma, gen_binom, rgamma};

/// (x, Γ(x)) computed with 40-digit arithmetic.
const GAMMA_REFERENCE: &[(f64, f64)] = &[
    (-17.616723516683763, 1.6019479256410753e-15),
    (-34.915082607549806, -1.5614670206191072e-39),
    (15.093447303985371, 111962745361.91645),
    (-42.756371333245724, -1.8805111440695477e-52),
    (3.5882004306689197, 3.6676285161162776),
    (-13.431108308741443, 1.6704199736573702e-10),
    (-44.20010752252932, -9.3990471963909701e-55),
    (0.7435733189420262, 1.2340632270206757),
    (-46.250434155801514, -3.0805057315329663e-58),
    (-6.635431633761414, -0.0014141829936149546),
    (-43.014457642538105, 1.0844644167313495e-51),
    (-40.928698665613496, -5.5138441360649276e-49),
    (-7.548081085748606, 0.00020484795641850876),
    (32.68521246720381, 8.80863247983049e+34),
    (-37.61980388503544, 2.5829602055785307e-44),
    (-27.676103539298545, 3.5776145555773291e-29),
    (12.743322240558932, 251134670.27194636),
    (44.77089424570056, 1.1148207756987492e+54),
    (7.7102948617498654, 2826.7412889993751),
    (-10.331952534921982, -4.5672525612925008e-7),
    (47.62551055929201, 6.1010317324500911e+58),
    (-45.34173193822437, 8.095372007569115e-57),
    (35.84684590486795, 5.9834312241061886e+39),
    (-21.039071366832374, 4.4546282456150344e-19),
    (-35.57449166425624, 4.0023070501530715e-41),
    (-38.220776192163164, -4.1938701909879382e-45),
    (-19.151817589806562, 3.5814792678681203e-17),
    (31.612635912003142, 2.1660155416607968e+33),
    (-31.927362007606252, 6.7955783274532951e-35),
    (8.160016366246623, 6970.1326045047343),
    (13.891346892618408, 4695107901.8150282),
    (-12.760245727426877, -1.3737887502002351e-9),
    (4.7744465709557815, 17.185557439613474),
    (-43.721102502667684, 4.4296040587275662e-54),
    (-44.03988300337674, -8.1283063148378933e-54),
    (-29.404128718067348, 9.4495773095770492e-32),
    (18.039997318178592, 398849356600530.92),
    (-7.240769433059711, 0.00055690001703299483),
    (-18.585282962320846, -9.13952214105214e-17),
    (8.556186350763873, 15777.443338694465),
    (-4.681562362922463, -0.053051155465945057),
    (-20.023300313631765, -1.64562358204816e-17),
    (29.43794815224912, 1.3266335350348186e+30),
    (19.899443372957123, 90257038359571156.0),
    (-25.59034892778471, 3.0969060839821528e-26),
    (7.442371025867104, 1673.0641945355141),
    (2.5196503811451407, 1.3479629701452856),
    (37.51374955734289, 2.3699119740989557e+42),
    (22.944528943921767, 9.4577392000294203e+20),
    (-21.20622351098135, 5.4065458002714107e-20),
    (48.017484749258216, 2.7668502574658644e+59),
    (-38.19342217450379, -5.1899190630623916e-45),
    (-8.187717821477278, -9.3548727638465011e-5),
    (25.714092956524937, 6.1545540999585624e+24),
    (-34.80154653394952, -1.0568841481011737e-39),
    (-1.1036899524194368, 9.3639385817372991),
    (-46.07927429525623, -1.7083646706722133e-57),
    (16.821585653439513, 12700225960695.188),
    (26.457086621281306, 6.8444330315373744e+25),
    (7.302594027738394, 1277.7652032098175),
    (37.54778118308883, 2.6798679954491366e+42),
    (-18.625248715190324, -8.4813877514028782e-17),
    (19.52953662736593, 30244225070667902.0),
    (9.436987710501846, 103888.11696008266),
    (7.989520428249222, 4934.6923802012325),
    (-4.379466869858696, -0.078325824574369817),
    (33.99677805125414, 8.5856283707491069e+36),
    (44.46810951079374, 3.5418768488705748e+53),
    (-2.590166258035552, -0.89014306958836258),
    (16.41522054746744, 4103687629472.9418),
    (-43.93305724027803, 7.2984002439461061e-54),
    (20.14920213044239, 1.8959411079059366e+17),
    (14.712885452766884, 40567688313.043065),
    (49.30959394666341, 4.1327089496139144e+61),
    (32.19247866097149, 1.5983538833108959e+34),
    (-21.540446790585076, 1.1729060166141002e-20),
    (-11.420855755328915, 2.8826936319947893e-8),
    (16.86527158841882, 14348960193404.0),
    (-47.74370719444114, 9.4861222635143075e-61),
    (-3.8304713700234174, 0.33171452752114711),
    (-33.195162109345546, 3.1666301321592227e-37),
    (-38.29042055182681, -2.6275089793273767e-45),
    (-44.10455806686896, -2.4630755878660418e-54),
    (26.823298847252076, 2.2614223455648124e+26),
    (-37.06597779813158, 8.7317720429430238e-43),
    (-25.23851663030857, 1.3718082537993438e-25),
    (-10.905029686677295, -3.3751731365600277e-7),
    (37.14219741262994, 6.2059920402670654e+41),
    (-41.941869879986136, 1.5310134193403103e-50),
    (-5.081259905066901, 0.090198867129535855),
    (4.9439909144037415, 22.066180482996703),
    (38.33838264415125, 4.6992343548189122e+43),
    (31.927983783574135, 6.4143636107276711e+33),
    (36.39844696985152, 4.2942723932875512e+40),
    (-22.157893548610286, -3.5898870384441757e-21),
    (-8.470348278830144, -2.8229568961731406e-5),
    (-14.122883466837521, -6.8863780601335454e-11),
    (38.419282719821695, 6.3055143880840232e+43),
    (45.77312039639912, 5.0336958276566385e+55),
    (-34.907909420889105, -1.4802615127588848e-39),
    (-32.37822715096297, -3.4416854808013444e-36),
    (-26.804313318046425, -9.561479923384658e-28),
    (-26.66639163191389, -1.0039663074016129e-27),
    (-1.5037269658643382, 2.3572401772979369),
    (8.912350373225564, 33437.370229391263),
    (-23.725338070146208, 1.6020694080271483e-23),
    (-49.590639661493604, 5.3513797838719327e-64),
    (-8.105349887467206, -0.00019124085906304736),
    (-13.074642710527463, 1.7875238079198543e-9),
    (6.634122370639197, 366.6897916595759),
    (45.309792552509535, 8.6242044531516409e+54),
    (19.049365713597794, 7394810304507228.0),
    (1.5491433070778413, 0.88880603057360946),
    (11.759274940912768, 22227339.986241224),
    (17.620008244950142, 120366650584895.53),
    (-44.60071067762098, -1.2668190462226683e-55),
    (39.95330100579521, 1.71805494774671e+46),
    (27.996949070607286, 1.0779323084279835e+28),
    (37.45131841344765, 1.8916446966031636e+42),
    (29.787312119656605, 4.3077929407767433e+30),
    (0.001, 999.42377248459545),
    (-0.001, -1000.5782056293586),
    (1e-08, 99999999.422784343),
    (-3.5, 0.27008820585226911),
    (-49.9, 4.9474277080810223e-64),
    (49.7, 1.8884987110141094e+62),
    (-20.25, -8.5690326638851275e-19),
    (0.5, 1.772453850905516),
    (1.5, 0.88622692545275801),
    (2.5, 1.329340388179137),
    (-0.5, -3.5449077018110321),
    (-1.5, 2.3632718012073547),
    (-10.999, -2.5113417228071353e-5),
    (-11.001, 2.4991029260114449e-5),
    (3.0000001, 2.0000001845568792),
    (49.5, 8.6676018431352723e+61),
    (33.3, 7.4875775965226323e+35),
    (-33.3, 1.5574232666822074e-37),
    (7.25, 1155.3810139199897),
    (-7.25, 0.00053039770635214786),
];

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn gamma_matches_reference_to_1e13() {
    let mut worst = (0.0, 0.0);
    for &(x, expected) in GAMMA_REFERENCE {
        let e = rel(gamma(x).unwrap(), expected);
        if e > worst.1 {
            worst = (x, e);
        }
    }
    println!("worst relative error {:e} at x = {}", worst.1, worst.0);
    assert!(worst.1 <= 1e-13, "worst relative error {:e} at x = {}", worst.1, worst.0);
}

#[test]
fn rgamma_matches_reference() {
    for &(x, expected) in GAMMA_REFERENCE {
        assert!(rel(rgamma(x), 1.0 / expected) <= 1e-13, "x = {x}");
    }
}

#[test]
fn recurrence_on_grid() {
    // 100 non-pole points in [-10, 10]
    for i in 0..100 {
        let x = -10.0 + 20.0 * (i as f64 + 0.5) / 100.0 + 0.013;
        let lhs = gamma(x + 1.0).unwrap();
        let rhs = x * gamma(x).unwrap();
        assert!(rel(lhs, rhs) <= 1e-12, "x = {x}");
    }
}

#[test]
fn half_integer_values() {
    let sqrt_pi = std::f64::consts::PI.sqrt();
    assert!(rel(gamma(0.5).unwrap(), 1.772_453_850_905_516) < 1e-15);
    assert!(rel(gamma(1.5).unwrap(), sqrt_pi / 2.0) < 1e-15);
    assert!(rel(gamma(-0.5).unwrap(), -2.0 * sqrt_pi) < 1e-15);
    assert!(rel(rgamma(2.5), 0.752_252_778_063_675_05) < 1e-14);
}

#[test]
fn reciprocal_zeros_at_poles() {
    for n in 0..=20 {
        assert_eq!(rgamma(-(n as f64)), 0.0);
        assert!(gamma(-(n as f64)).is_err());
    }
}

/// Independent route: C(α,k) = C(α,k−1)·(α−k+1)/k.
fn binom_by_recurrence(alpha: f64, k: u32) -> f64 {
    (1..=k).fold(1.0, |c, j| c * (alpha - f64::from(j) + 1.0) / f64::from(j))
}

#[test]
fn binomial_product_and_recurrence_agree() {
    for &alpha in &[0.3, 0.5, 1.0, 1.5] {
        for k in 0..=64u32 {
            let product = gen_binom(alpha, k);
            let recurrence = binom_by_recurrence(alpha, k);
            if recurrence == 0.0 {
                assert_eq!(product, 0.0, "alpha = {alpha}, k = {k}");
            } else {
                assert!(
                    rel(product, recurrence) <= 1e-12,
                    "alpha = {alpha}, k = {k}: {product} vs {recurrence}"
                );
            }
        }
    }
}
