#pragma once

#include <array>
#include <string_view>

namespace biobench::datagen {

enum class Family { volume, thickness, area, generic };

struct MorphometryEntry {
  std::string_view name;
  Family family;
  double mean;
  double sd;
};

// Surrogate healthy-adult morphometry: 14 subcortical volumes (mm^3) plus
// Desikan-Killiany cortical thickness (mm) and surface area (mm^2) for both
// hemispheres. Mirrors data/surrogate_morphometry.csv.
inline constexpr std::array<MorphometryEntry, 150> kSurrogateMorphometry{{
    {"Left-Thalamus", Family::volume, 7800.0, 700.0},
    {"Left-Caudate", Family::volume, 3700.0, 450.0},
    {"Left-Putamen", Family::volume, 5100.0, 550.0},
    {"Left-Pallidum", Family::volume, 1900.0, 220.0},
    {"Left-Hippocampus", Family::volume, 4200.0, 400.0},
    {"Left-Amygdala", Family::volume, 1600.0, 200.0},
    {"Left-Accumbens-area", Family::volume, 650.0, 110.0},
    {"Right-Thalamus", Family::volume, 7956.0, 714.0},
    {"Right-Caudate", Family::volume, 3774.0, 459.0},
    {"Right-Putamen", Family::volume, 5202.0, 561.0},
    {"Right-Pallidum", Family::volume, 1938.0, 224.4},
    {"Right-Hippocampus", Family::volume, 4284.0, 408.0},
    {"Right-Amygdala", Family::volume, 1632.0, 204.0},
    {"Right-Accumbens-area", Family::volume, 663.0, 112.2},
    {"lh_bankssts_thickness", Family::thickness, 2.6, 0.182},
    {"lh_caudalanteriorcingulate_thickness", Family::thickness, 2.7, 0.189},
    {"lh_caudalmiddlefrontal_thickness", Family::thickness, 2.6, 0.182},
    {"lh_cuneus_thickness", Family::thickness, 1.9, 0.133},
    {"lh_entorhinal_thickness", Family::thickness, 3.3, 0.231},
    {"lh_fusiform_thickness", Family::thickness, 2.8, 0.196},
    {"lh_inferiorparietal_thickness", Family::thickness, 2.5, 0.175},
    {"lh_inferiortemporal_thickness", Family::thickness, 2.8, 0.196},
    {"lh_isthmuscingulate_thickness", Family::thickness, 2.5, 0.175},
    {"lh_lateraloccipital_thickness", Family::thickness, 2.2, 0.154},
    {"lh_lateralorbitofrontal_thickness", Family::thickness, 2.7, 0.189},
    {"lh_lingual_thickness", Family::thickness, 2.0, 0.14},
    {"lh_medialorbitofrontal_thickness", Family::thickness, 2.5, 0.175},
    {"lh_middletemporal_thickness", Family::thickness, 2.9, 0.203},
    {"lh_parahippocampal_thickness", Family::thickness, 2.7, 0.189},
    {"lh_paracentral_thickness", Family::thickness, 2.4, 0.168},
    {"lh_parsopercularis_thickness", Family::thickness, 2.6, 0.182},
    {"lh_parsorbitalis_thickness", Family::thickness, 2.8, 0.196},
    {"lh_parstriangularis_thickness", Family::thickness, 2.5, 0.175},
    {"lh_pericalcarine_thickness", Family::thickness, 1.7, 0.119},
    {"lh_postcentral_thickness", Family::thickness, 2.1, 0.147},
    {"lh_posteriorcingulate_thickness", Family::thickness, 2.6, 0.182},
    {"lh_precentral_thickness", Family::thickness, 2.6, 0.182},
    {"lh_precuneus_thickness", Family::thickness, 2.4, 0.168},
    {"lh_rostralanteriorcingulate_thickness", Family::thickness, 2.9, 0.203},
    {"lh_rostralmiddlefrontal_thickness", Family::thickness, 2.5, 0.175},
    {"lh_superiorfrontal_thickness", Family::thickness, 2.8, 0.196},
    {"lh_superiorparietal_thickness", Family::thickness, 2.3, 0.161},
    {"lh_superiortemporal_thickness", Family::thickness, 2.8, 0.196},
    {"lh_supramarginal_thickness", Family::thickness, 2.6, 0.182},
    {"lh_frontalpole_thickness", Family::thickness, 2.8, 0.196},
    {"lh_temporalpole_thickness", Family::thickness, 3.6, 0.252},
    {"lh_transversetemporal_thickness", Family::thickness, 2.3, 0.161},
    {"lh_insula_thickness", Family::thickness, 3.0, 0.21},
    {"rh_bankssts_thickness", Family::thickness, 2.574, 0.1802},
    {"rh_caudalanteriorcingulate_thickness", Family::thickness, 2.673, 0.1871},
    {"rh_caudalmiddlefrontal_thickness", Family::thickness, 2.574, 0.1802},
    {"rh_cuneus_thickness", Family::thickness, 1.881, 0.1317},
    {"rh_entorhinal_thickness", Family::thickness, 3.267, 0.2287},
    {"rh_fusiform_thickness", Family::thickness, 2.772, 0.194},
    {"rh_inferiorparietal_thickness", Family::thickness, 2.475, 0.1733},
    {"rh_inferiortemporal_thickness", Family::thickness, 2.772, 0.194},
    {"rh_isthmuscingulate_thickness", Family::thickness, 2.475, 0.1733},
    {"rh_lateraloccipital_thickness", Family::thickness, 2.178, 0.1525},
    {"rh_lateralorbitofrontal_thickness", Family::thickness, 2.673, 0.1871},
    {"rh_lingual_thickness", Family::thickness, 1.98, 0.1386},
    {"rh_medialorbitofrontal_thickness", Family::thickness, 2.475, 0.1733},
    {"rh_middletemporal_thickness", Family::thickness, 2.871, 0.201},
    {"rh_parahippocampal_thickness", Family::thickness, 2.673, 0.1871},
    {"rh_paracentral_thickness", Family::thickness, 2.376, 0.1663},
    {"rh_parsopercularis_thickness", Family::thickness, 2.574, 0.1802},
    {"rh_parsorbitalis_thickness", Family::thickness, 2.772, 0.194},
    {"rh_parstriangularis_thickness", Family::thickness, 2.475, 0.1733},
    {"rh_pericalcarine_thickness", Family::thickness, 1.683, 0.1178},
    {"rh_postcentral_thickness", Family::thickness, 2.079, 0.1455},
    {"rh_posteriorcingulate_thickness", Family::thickness, 2.574, 0.1802},
    {"rh_precentral_thickness", Family::thickness, 2.574, 0.1802},
    {"rh_precuneus_thickness", Family::thickness, 2.376, 0.1663},
    {"rh_rostralanteriorcingulate_thickness", Family::thickness, 2.871, 0.201},
    {"rh_rostralmiddlefrontal_thickness", Family::thickness, 2.475, 0.1733},
    {"rh_superiorfrontal_thickness", Family::thickness, 2.772, 0.194},
    {"rh_superiorparietal_thickness", Family::thickness, 2.277, 0.1594},
    {"rh_superiortemporal_thickness", Family::thickness, 2.772, 0.194},
    {"rh_supramarginal_thickness", Family::thickness, 2.574, 0.1802},
    {"rh_frontalpole_thickness", Family::thickness, 2.772, 0.194},
    {"rh_temporalpole_thickness", Family::thickness, 3.564, 0.2495},
    {"rh_transversetemporal_thickness", Family::thickness, 2.277, 0.1594},
    {"rh_insula_thickness", Family::thickness, 2.97, 0.2079},
    {"lh_bankssts_area", Family::area, 1000.0, 120.0},
    {"lh_caudalanteriorcingulate_area", Family::area, 650.0, 78.0},
    {"lh_caudalmiddlefrontal_area", Family::area, 2200.0, 264.0},
    {"lh_cuneus_area", Family::area, 1500.0, 180.0},
    {"lh_entorhinal_area", Family::area, 420.0, 50.4},
    {"lh_fusiform_area", Family::area, 3200.0, 384.0},
    {"lh_inferiorparietal_area", Family::area, 5300.0, 636.0},
    {"lh_inferiortemporal_area", Family::area, 3300.0, 396.0},
    {"lh_isthmuscingulate_area", Family::area, 1000.0, 120.0},
    {"lh_lateraloccipital_area", Family::area, 4700.0, 564.0},
    {"lh_lateralorbitofrontal_area", Family::area, 2800.0, 336.0},
    {"lh_lingual_area", Family::area, 3100.0, 372.0},
    {"lh_medialorbitofrontal_area", Family::area, 1900.0, 228.0},
    {"lh_middletemporal_area", Family::area, 3300.0, 396.0},
    {"lh_parahippocampal_area", Family::area, 680.0, 81.6},
    {"lh_paracentral_area", Family::area, 1500.0, 180.0},
    {"lh_parsopercularis_area", Family::area, 1600.0, 192.0},
    {"lh_parsorbitalis_area", Family::area, 700.0, 84.0},
    {"lh_parstriangularis_area", Family::area, 1400.0, 168.0},
    {"lh_pericalcarine_area", Family::area, 1500.0, 180.0},
    {"lh_postcentral_area", Family::area, 4300.0, 516.0},
    {"lh_posteriorcingulate_area", Family::area, 1100.0, 132.0},
    {"lh_precentral_area", Family::area, 5000.0, 600.0},
    {"lh_precuneus_area", Family::area, 4000.0, 480.0},
    {"lh_rostralanteriorcingulate_area", Family::area, 750.0, 90.0},
    {"lh_rostralmiddlefrontal_area", Family::area, 5500.0, 660.0},
    {"lh_superiorfrontal_area", Family::area, 7400.0, 888.0},
    {"lh_superiorparietal_area", Family::area, 5300.0, 636.0},
    {"lh_superiortemporal_area", Family::area, 3900.0, 468.0},
    {"lh_supramarginal_area", Family::area, 4000.0, 480.0},
    {"lh_frontalpole_area", Family::area, 240.0, 28.8},
    {"lh_temporalpole_area", Family::area, 430.0, 51.6},
    {"lh_transversetemporal_area", Family::area, 330.0, 39.6},
    {"lh_insula_area", Family::area, 2100.0, 252.0},
    {"rh_bankssts_area", Family::area, 1010.0, 121.2},
    {"rh_caudalanteriorcingulate_area", Family::area, 656.5, 78.78},
    {"rh_caudalmiddlefrontal_area", Family::area, 2222.0, 266.64},
    {"rh_cuneus_area", Family::area, 1515.0, 181.8},
    {"rh_entorhinal_area", Family::area, 424.2, 50.9},
    {"rh_fusiform_area", Family::area, 3232.0, 387.84},
    {"rh_inferiorparietal_area", Family::area, 5353.0, 642.36},
    {"rh_inferiortemporal_area", Family::area, 3333.0, 399.96},
    {"rh_isthmuscingulate_area", Family::area, 1010.0, 121.2},
    {"rh_lateraloccipital_area", Family::area, 4747.0, 569.64},
    {"rh_lateralorbitofrontal_area", Family::area, 2828.0, 339.36},
    {"rh_lingual_area", Family::area, 3131.0, 375.72},
    {"rh_medialorbitofrontal_area", Family::area, 1919.0, 230.28},
    {"rh_middletemporal_area", Family::area, 3333.0, 399.96},
    {"rh_parahippocampal_area", Family::area, 686.8, 82.42},
    {"rh_paracentral_area", Family::area, 1515.0, 181.8},
    {"rh_parsopercularis_area", Family::area, 1616.0, 193.92},
    {"rh_parsorbitalis_area", Family::area, 707.0, 84.84},
    {"rh_parstriangularis_area", Family::area, 1414.0, 169.68},
    {"rh_pericalcarine_area", Family::area, 1515.0, 181.8},
    {"rh_postcentral_area", Family::area, 4343.0, 521.16},
    {"rh_posteriorcingulate_area", Family::area, 1111.0, 133.32},
    {"rh_precentral_area", Family::area, 5050.0, 606.0},
    {"rh_precuneus_area", Family::area, 4040.0, 484.8},
    {"rh_rostralanteriorcingulate_area", Family::area, 757.5, 90.9},
    {"rh_rostralmiddlefrontal_area", Family::area, 5555.0, 666.6},
    {"rh_superiorfrontal_area", Family::area, 7474.0, 896.88},
    {"rh_superiorparietal_area", Family::area, 5353.0, 642.36},
    {"rh_superiortemporal_area", Family::area, 3939.0, 472.68},
    {"rh_supramarginal_area", Family::area, 4040.0, 484.8},
    {"rh_frontalpole_area", Family::area, 242.4, 29.09},
    {"rh_temporalpole_area", Family::area, 434.3, 52.12},
    {"rh_transversetemporal_area", Family::area, 333.3, 40.0},
    {"rh_insula_area", Family::area, 2121.0, 254.52},
}};

} // namespace biobench::datagen
