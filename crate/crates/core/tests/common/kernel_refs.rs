// Generated by tools/gen_kernel_refs.py; 50-digit evaluations printed with 17 digits.

#![allow(clippy::excessive_precision)]

pub const NORMAL_CDF: [(f64, f64); 20] = [
    (-8.0, 6.2209605742717841e-16),
    (-6.0, 9.8658764503769814e-10),
    (-5.0, 2.8665157187919391e-7),
    (-4.0, 3.1671241833119921e-5),
    (-3.5, 0.00023262907903552504),
    (-3.0, 0.0013498980316300945),
    (-2.5, 0.0062096653257761352),
    (-2.0, 0.022750131948179207),
    (-1.96, 0.024997895148220434),
    (-1.5, 0.066807201268858066),
    (-1.0, 0.15865525393145705),
    (-0.5, 0.30853753872598690),
    (0.0, 0.50000000000000000),
    (0.25, 0.59870632568292372),
    (0.675, 0.75016211752822299),
    (1.0, 0.84134474606854295),
    (1.644854, 0.95000003847458695),
    (2.326348, 0.99000000335708092),
    (3.090232, 0.99899999896910491),
    (5.5, 0.99999998101043753),
];
pub const T_CDF: [(f64, f64, f64); 30] = [
    (-30.0, 1.0, 0.010606402405535423),
    (-3.0, 1.0, 0.10241638234956673),
    (0.5, 1.0, 0.64758361765043327),
    (2.0, 1.0, 0.85241638234956673),
    (-2.0, 2.0, 0.091751709536136984),
    (4.3, 2.0, 0.97497142294145421),
    (-5.0, 3.0, 0.0076962190366511505),
    (1.5, 4.5, 0.89989045717192324),
    (-2.5, 5.0, 0.027245049671188121),
    (0.1, 5.0, 0.53788492942266981),
    (-1.8, 10.0, 0.051026121567339510),
    (3.0, 10.0, 0.99332817248871521),
    (-8.23, 30.0, 1.7327266646578414e-9),
    (2.04, 30.0, 0.97488021263045656),
    (-0.176, 267.0, 0.43021367721979633),
    (-15.21, 548.0, 3.8482587531435018e-44),
    (-3.02, 487.0, 0.0013302554667997737),
    (1.626, 754.0, 0.94781624835569677),
    (8.23, 815.0, 0.99999999999999963),
    (-1.97, 1035.0, 0.024552328388142757),
    (7.93, 481.55, 0.99999999999999229),
    (-2.1, 100.0, 0.019122627910640472),
    (0.7, 1000.0, 0.75795494300369883),
    (-1.96, 10000.0, 0.025011760115916523),
    (1.96, 1000000.0, 0.97500196620736511),
    (-4.0, 50.0, 0.00010459512318201680),
    (12.0, 7.0, 0.99999682084481091),
    (-0.001, 2.5, 0.49963819136039244),
    (6.0, 200.0, 0.99999999544243983),
    (-37.0, 12.0, 4.8733880383305716e-14),
];
pub const T_QUANTILE: [(f64, f64, f64); 10] = [
    (0.975, 1.0, 12.706204736174693),
    (0.975, 2.0, 4.3026527297494618),
    (0.975, 10.0, 2.2281388519862742),
    (0.975, 30.0, 2.0422724563012379),
    (0.995, 548.0, 2.5848305990608904),
    (0.975, 267.0, 1.9688886224492942),
    (0.025, 487.0, -1.9648471009786735),
    (0.975, 100000.0, 1.9599877075346093),
    (0.975, 1000000.0, 1.9599663568141067),
    (0.9, 3.5, 1.5765766051364053),
];
