#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace mht::reference {

// Published values for T = 2 on meshes n = 2, 4, ..., 2048 (128 for the cubic residual table).
struct Column {
    std::string table;    // table1 .. table8
    std::string quantity; // c_S, c_S_over_h, error, residual, c_S_residual
    int nu;               // -1 where the degree does not apply
    std::string func;     // empty for table1
    std::vector<double> values;
    std::vector<double> eoc; // NaN-free; eoc[0] belongs to the second row
};

inline std::vector<std::size_t> mesh_sizes(std::size_t nmax) {
    std::vector<std::size_t> n;
    for (std::size_t m = 2; m <= nmax; m *= 2) n.push_back(m);
    return n;
}

inline const std::vector<Column>& columns() {
    static const std::vector<Column> cols{
        {"table1", "c_S", 0, "",
         {0.411711, 0.211292, 0.106338, 0.053256, 0.026639, 0.013321, 0.006661, 0.003330, 0.001665, 0.000833, 0.000416},
         {}},
        {"table1", "c_S_over_h", 0, "",
         {0.412, 0.423, 0.425, 0.426, 0.426, 0.426, 0.426, 0.426, 0.426, 0.426, 0.426},
         {}},
        {"table1", "c_S", 1, "",
         {0.515034, 0.344142, 0.204556, 0.112324, 0.058935, 0.030192, 0.015281, 0.007687, 0.003855, 0.001931, 0.000966},
         {}},
        {"table1", "c_S_over_h", 1, "",
         {0.515, 0.688, 0.818, 0.899, 0.943, 0.966, 0.978, 0.984, 0.987, 0.988, 0.989},
         {}},
        {"table1", "c_S", 2, "",
         {0.429033, 0.271686, 0.155494, 0.083498, 0.043295, 0.022047, 0.011125, 0.005588, 0.002800, 0.001402, 0.000701},
         {}},
        {"table1", "c_S_over_h", 2, "",
         {0.429, 0.543, 0.622, 0.668, 0.693, 0.705, 0.712, 0.715, 0.717, 0.718, 0.718},
         {}},

        {"table2", "error", 0, "sin_pi4",
         {3.983e-1, 1.825e-1, 8.971e-2, 4.475e-2, 2.238e-2, 1.120e-2, 5.599e-3, 2.800e-3, 1.400e-3, 7.001e-4, 3.501e-4},
         {1.13, 1.02, 1.00, 1.00, 1.00, 1.00, 1.00, 1.00, 1.00, 1.00}},
        {"table2", "error", 1, "sin_pi4",
         {2.605e-2, 5.933e-3, 1.448e-3, 3.599e-4, 8.984e-5, 2.245e-5, 5.613e-6, 1.403e-6, 3.508e-7, 8.769e-8, 2.192e-8},
         {2.13, 2.03, 2.01, 2.00, 2.00, 2.00, 2.00, 2.00, 2.00, 2.00}},
        {"table2", "error", 2, "sin_pi4",
         {3.893e-3, 5.465e-4, 7.051e-5, 8.885e-6, 1.113e-6, 1.392e-7, 1.740e-8, 2.175e-9, 2.719e-10, 3.398e-11, 4.236e-12},
         {2.83, 2.95, 2.99, 3.00, 3.00, 3.00, 3.00, 3.00, 3.00, 3.00}},

        {"table3", "error", 0, "t_23",
         {4.796e-1, 2.921e-1, 1.783e-1, 1.093e-1, 6.741e-2, 4.181e-2, 2.605e-2, 1.628e-2, 1.021e-2, 6.408e-3, 4.028e-3},
         {0.72, 0.71, 0.71, 0.70, 0.69, 0.68, 0.68, 0.67, 0.67, 0.67}},
        {"table3", "error", 1, "t_23",
         {1.597e-1, 9.222e-2, 5.506e-2, 3.369e-2, 2.090e-2, 1.306e-2, 8.195e-3, 5.152e-3, 3.243e-3, 2.042e-3, 1.286e-3},
         {0.79, 0.74, 0.71, 0.69, 0.67, 0.67, 0.67, 0.67, 0.67, 0.67}},
        {"table3", "error", 2, "t_23",
         {6.268e-2, 3.693e-2, 2.237e-2, 1.381e-2, 8.604e-3, 5.391e-3, 3.387e-3, 2.131e-3, 1.341e-3, 8.447e-4, 5.320e-4},
         {0.76, 0.72, 0.70, 0.68, 0.67, 0.67, 0.67, 0.67, 0.67, 0.67}},

        {"table4", "error", 0, "t_Tt_23",
         {8.327e-1, 3.980e-1, 1.968e-1, 9.852e-2, 4.951e-2, 2.490e-2, 1.252e-2, 6.287e-3, 3.156e-3, 1.583e-3, 7.936e-4},
         {1.07, 1.02, 1.00, 0.99, 0.99, 0.99, 0.99, 0.99, 1.00, 1.00}},
        {"table4", "error", 1, "t_Tt_23",
         {1.506e-1, 5.054e-2, 1.823e-2, 7.180e-3, 3.000e-3, 1.295e-3, 5.677e-4, 2.510e-4, 1.114e-4, 4.952e-5, 2.204e-5},
         {1.58, 1.47, 1.34, 1.26, 1.21, 1.19, 1.18, 1.17, 1.17, 1.17}},
        {"table4", "error", 2, "t_Tt_23",
         {3.061e-2, 1.221e-2, 5.210e-3, 2.271e-3, 1.001e-3, 4.433e-4, 1.969e-4, 8.760e-5, 3.899e-5, 1.736e-5, 7.733e-6},
         {1.33, 1.23, 1.20, 1.18, 1.17, 1.17, 1.17, 1.17, 1.17, 1.17}},

        {"table5", "residual", 0, "cubic_a",
         {1.86270658, 0.45239154, 0.11030583, 0.02713342, 0.00671882, 0.00167065, 0.00041642},
         {2.00, 2.00, 2.00, 2.00, 2.00, 2.00}},
        {"table5", "residual", 0, "cubic_b",
         {1.80230151, 0.63072107, 0.21675270, 0.07528792, 0.02637954, 0.00928626, 0.00327641},
         {1.50, 1.50, 1.50, 1.50, 1.50, 1.50}},

        {"table6", "c_S_residual", 0, "sin_pi4",
         {4.290e-1, 3.437e-1, 2.432e-1, 1.700e-1, 1.193e-1, 8.403e-2, 5.931e-2, 4.190e-2, 2.961e-2, 2.093e-2, 1.480e-2},
         {0.32, 0.50, 0.52, 0.51, 0.51, 0.50, 0.50, 0.50, 0.50, 0.50}},
        {"table6", "residual", 0, "sin_pi4",
         {1.411e-1, 4.922e-2, 1.691e-2, 5.888e-3, 2.067e-3, 7.284e-4, 2.572e-4, 9.086e-5, 3.211e-5, 1.135e-5, 4.013e-6},
         {1.52, 1.54, 1.52, 1.51, 1.50, 1.50, 1.50, 1.50, 1.50, 1.50}},
        {"table7", "c_S_residual", 0, "t_23",
         {4.467e-1, 2.990e-1, 2.055e-1, 1.433e-1, 1.006e-1, 7.090e-2, 5.005e-2, 3.536e-2, 2.499e-2, 1.767e-2, 1.249e-2},
         {0.58, 0.54, 0.52, 0.51, 0.51, 0.50, 0.50, 0.50, 0.50, 0.50}},
        {"table7", "residual", 0, "t_23",
         {1.629e-1, 7.255e-2, 3.233e-2, 1.440e-2, 6.415e-3, 2.858e-3, 1.273e-3, 5.670e-4, 2.526e-4, 1.125e-4, 5.012e-5},
         {1.17, 1.17, 1.17, 1.17, 1.17, 1.17, 1.17, 1.17, 1.17, 1.17}},
        {"table8", "c_S_residual", 0, "t_Tt_23",
         {4.128e-1, 3.391e-1, 2.599e-1, 1.952e-1, 1.476e-1, 1.138e-1, 9.009e-2, 7.326e-2, 6.106e-2, 5.193e-2, 4.485e-2},
         {0.28, 0.38, 0.41, 0.40, 0.37, 0.34, 0.30, 0.26, 0.23, 0.21}},
        {"table8", "residual", 0, "t_Tt_23",
         {3.040e-1, 1.104e-1, 3.968e-2, 1.442e-2, 5.353e-3, 2.042e-3, 8.022e-4, 3.247e-4, 1.349e-4, 5.724e-5, 2.468e-5},
         {1.46, 1.48, 1.46, 1.43, 1.39, 1.35, 1.31, 1.27, 1.24, 1.21}},
    };
    return cols;
}

inline const Column* find(const std::string& table, const std::string& quantity, int nu, const std::string& func = "") {
    for (const auto& c : columns())
        if (c.table == table && c.quantity == quantity && c.nu == nu && c.func == func) return &c;
    return nullptr;
}

} // namespace mht::reference
