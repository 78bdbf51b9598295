#pragma once

// Frozen reference values. Oracle values come from the scripts in oracles/
// (outputs saved next to them); regression values from build-time runs.
namespace fixtures {

// oracles/closed_forms.json
inline constexpr double kLensRadiusM1 = 0.90226778758442961414;
inline constexpr double kMu0 = 2.2166368205989512937;
inline constexpr double kRelativePerimeterR1W3 = 8.4567393972175136911;
inline constexpr double kHalfPerimeterMarginM1 = 0.32693158523497787141;
inline constexpr double kSquareRieszA1 = 2.9732095982473787025;
inline constexpr double kSquareRieszA05 = 1.5844091715698880935;
inline constexpr double kSquareRieszA15 = 8.0556092819183896073;
inline constexpr double kDiskRieszContinuum = 16.755160819145563938;
inline constexpr double kSawtoothDeficitS1T01 = 0.019803902718556966006;
inline constexpr double kSawtoothRatioS1T01 = 7.9215610874227864023;
inline constexpr double kSawtoothRatioS1T0001 = 7.99999200001599996;
inline constexpr double kSawtoothRatioS2T0001 = 0.99999975000012499992;

// oracles/riesz_mc.json (10^7 pairs, 95% half width)
inline constexpr double kDiskMonteCarlo = 16.752376729133285;
inline constexpr double kDiskMonteCarloHalfWidth = 0.02394893780045073;
inline constexpr double kLensMonteCarlo = 2.9582303009322373;
inline constexpr double kLensMonteCarloHalfWidth = 0.004481055268608628;

// regression values
inline constexpr double kDiskRiesz = 16.752637625933136;  // 256-gon, a = 1
inline constexpr double kUnitLensRiesz = 2.9594922355777276;
inline constexpr double kLensBoundM001 = 0.22462317429547288;
inline constexpr double kLensBoundM005 = 0.52874319031699923;
// default ensemble plus sawtooth {0.1, 0.05, 0.01, 0.005, 0.001} and
// dilations {-0.05, -0.02, 0.02, 0.05}
inline constexpr double kKappaMinRatio = 0.011537972248108474;
inline constexpr double kKappaMedianRatio = 0.072286340405715369;
inline constexpr const char* kKappaArgmin = "random-440";
// random competitor, seed 42, eps0 0.05, 6 modes, unit-radius lens, R = 10
inline constexpr double kSeed42Deficit = 0.00037119406206058842;
inline constexpr double kSeed42Asymmetry = 0.037210800645153946;

// nonlocal sweep, gamma = a = 1, masses {0.2, 0.1, 0.05, 0.01}, default
// optimizer settings without the free-polygon check
inline constexpr double kSweepEnergy[] = {1.2558408613218555, 0.79458937485484959, 0.52879884232983565,
                                          0.22465182395624578};
inline constexpr double kSweepAsymmetry[] = {0.022855173092596326, 0.010942427977219671, 0.005350339663485304,
                                             0.0010412786906639493};

}  // namespace fixtures
