"""Published benchmark values used by ``fgmrisk reproduce``.

Keys mirror the benchmark layouts: dependence labels END / Ind / EPD,
risk levels kappa, spans h, and 1-based risk numbers in list order.
"""

KAPPAS = (0.9, 0.99, 0.999)
SCHEMES = ("END", "Ind", "EPD")

# W_d = S_d / d for d iid Exponential(0.1) risks; per kappa: (END, Ind, EPD)
EXCHANGEABLE_EXP = {
    1: {
        "VaR": {0.9: (23.03, 23.03, 23.03), 0.99: (46.05, 46.05, 46.05), 0.999: (69.08, 69.08, 69.08)},
        "TVaR": {0.9: (33.03, 33.03, 33.03), 0.99: (56.05, 56.05, 56.05), 0.999: (79.08, 79.08, 79.08)},
    },
    2: {
        "VaR": {0.9: (18.09, 19.45, 20.90), 0.99: (29.91, 33.19, 35.55), 0.999: (41.46, 46.17, 48.86)},
        "TVaR": {0.9: (23.25, 25.47, 27.37), 0.99: (34.93, 38.85, 41.36), 0.999: (46.47, 51.66, 54.43)},
    },
    10: {
        "VaR": {0.9: (13.63, 14.21, 17.85), 0.99: (17.58, 18.78, 23.19), 0.999: (20.95, 22.66, 27.40)},
        "TVaR": {0.9: (15.38, 16.24, 20.26), 0.99: (19.06, 20.48, 25.05), 0.999: (22.31, 24.20, 29.04)},
    },
    100: {
        "VaR": {0.9: (11.13, 11.30, 15.93), 0.99: (12.14, 12.47, 17.39), 0.999: (12.92, 13.38, 18.44)},
        "TVaR": {0.9: (11.58, 11.83, 16.60), 0.99: (12.48, 12.87, 17.86), 0.999: (13.21, 13.72, 18.82)},
    },
    1000: {
        "VaR": {0.9: (10.35, 10.41, 15.30), 0.99: (10.65, 10.75, 15.74), 0.999: (10.87, 11.01, 16.04)},
        "TVaR": {0.9: (10.49, 10.56, 15.50), 0.99: (10.75, 10.86, 15.87), 0.999: (10.95, 11.10, 16.15)},
    },
}

# relative TVaR_0.9 effect against independence: (END, EPD)
RELATIVE_EFFECT = {2: (-0.0870, 0.0744), 1000: (-0.0072, 0.4671)}

# three log-normal risks (mean 10; variances 20, 50, 100), Markov alpha = 0.5
LOGNORMAL_VARIANCES = (20.0, 50.0, 100.0)
LOGNORMAL_ALPHA = 0.5
DISCRETIZED_TVAR = {
    "upper": {
        2.0: {0.9: 57.60, 0.99: 92.65, 0.999: 142.93},
        1.0: {0.9: 59.08, 0.99: 94.13, 0.999: 144.42},
        0.5: {0.9: 59.83, 0.99: 94.88, 0.999: 145.16},
        0.1: {0.9: 60.43, 0.99: 95.48, 0.999: 145.76},
    },
    "lower": {
        0.1: {0.9: 60.73, 0.99: 95.78, 0.999: 146.06},
        0.5: {0.9: 61.33, 0.99: 96.38, 0.999: 146.66},
        1.0: {0.9: 62.08, 0.99: 97.13, 0.999: 147.42},
        2.0: {0.9: 63.60, 0.99: 98.65, 0.999: 148.93},
    },
}

# six mixed Erlang risks at rate 1/2; shape law is 1 + K for these counts K
SIX_RISK_RATE = 0.5
SIX_RISK_COUNTS = (
    ("dirac", {"k": 0}),
    ("geometric", {"p": 0.5}),
    ("poisson", {"mu": 5.0}),
    ("negbin", {"n": 2, "p": 0.25}),
    ("poisson", {"mu": 10.0}),
    ("negbin", {"n": 3, "p": 0.2}),
)
SIX_RISK_SUMMARY = {
    "E": (2, 4, 12, 14, 22, 26),
    "Var": (4, 16, 44, 124, 84, 292),
    "VaR": (9.21, 18.42, 31.44, 50.86, 47.45, 79.72),
    "TVaR": (11.21, 22.42, 35.40, 59.90, 52.30, 92.03),
}

# E[X_k | S = s]
CMRS = {
    40: {
        "END": (1.928175, 2.987516, 7.996234, 5.766606, 13.401958, 7.919511),
        "Ind": (1.575428, 2.551020, 7.668274, 5.699930, 13.761121, 8.744228),
        "EPD": (0.941819, 1.757806, 7.136790, 5.658961, 14.296102, 10.208524),
    },
    80: {
        "END": (2.030938, 4.123420, 12.407195, 13.910778, 22.776325, 24.751343),
        "Ind": (2.042401, 4.106984, 12.392149, 13.867892, 22.741896, 24.848677),
        "EPD": (2.205948, 4.149484, 12.499946, 13.398856, 22.671998, 25.073768),
    },
    160: {
        "END": (1.721004, 4.234335, 13.912178, 30.207898, 27.145704, 82.778881),
        "Ind": (2.330977, 5.554256, 15.892004, 31.485783, 29.453031, 75.283950),
        "EPD": (3.347377, 7.541924, 18.660443, 32.720014, 32.458935, 65.271307),
    },
}

# kappa = 0.99 aggregate figures and Euler contributions
TVAR_ALLOCATION = {
    "END": {"Var": 452.45, "VaR": 140.58, "TVaR": 153.41, "contrib": (1.74, 4.26, 13.91, 29.10, 27.06, 77.35)},
    "Ind": {"Var": 564.0, "VaR": 146.71, "TVaR": 160.14, "contrib": (2.33, 5.55, 15.87, 31.44, 29.41, 75.54)},
    "EPD": {"Var": 1121.77, "VaR": 163.57, "TVaR": 177.24, "contrib": (3.39, 7.79, 19.08, 36.48, 33.23, 77.25)},
}
