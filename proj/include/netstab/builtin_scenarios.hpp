// Generated from scenarios/*.json; tests check the two stay identical.
#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace netstab {

struct BuiltinScenario {
  std::string_view name;
  std::string_view json;
};

inline constexpr std::array<BuiltinScenario, 4> kBuiltinScenarios{{
    {"example1_set1", R"json({
  "version": 1,
  "name": "example1_set1",
  "description": "Three patches: Holling type II predator-prey at patches 1 and 3, ratio-dependent at patch 2. Both layers w12=0, w13=0.1, w23=1.",
  "patches": [
    {
      "model": "rosenzweig_macarthur",
      "params": {
        "gamma": 0.23076923076923078,
        "beta": 0.1,
        "alpha": 0.16666666666666666
      }
    },
    {
      "model": "ratio_dependent",
      "params": {
        "c": 1.8,
        "b": 1.8,
        "m": 0.25
      }
    },
    {
      "model": "rosenzweig_macarthur",
      "params": {
        "gamma": 0.23076923076923078,
        "beta": 0.1,
        "alpha": 0.16666666666666666
      }
    }
  ],
  "layers": [
    {
      "variable": 1,
      "edges": [
        {
          "u": 1,
          "v": 2,
          "w": 0.0
        },
        {
          "u": 1,
          "v": 3,
          "w": 0.1
        },
        {
          "u": 2,
          "v": 3,
          "w": 1.0
        }
      ]
    },
    {
      "variable": 2,
      "edges": [
        {
          "u": 1,
          "v": 2,
          "w": 0.0
        },
        {
          "u": 1,
          "v": 3,
          "w": 0.1
        },
        {
          "u": 2,
          "v": 3,
          "w": 1.0
        }
      ]
    }
  ],
  "equilibrium": {
    "per_patch": [
      0.2,
      0.16
    ]
  },
  "analysis": {
    "epsilon": 0.0,
    "basis_scaling": 1e-06,
    "sim": {
      "delta": 0.001,
      "horizon": 400.0,
      "trials": 8,
      "seed": 1
    }
  },
  "reference": {
    "spectrum": [
      [
        -2.48560848,
        0
      ],
      [
        -2.13309217,
        0
      ],
      [
        -0.94067664,
        0
      ],
      [
        -0.1863,
        0.1598
      ],
      [
        -0.1863,
        -0.1598
      ],
      [
        -0.02362,
        0
      ]
    ],
    "note": "published values, rounded as printed"
  }
}
)json"},
    {"example1_set2", R"json({
  "version": 1,
  "name": "example1_set2",
  "description": "Example 1 patches with prey weights w13=w23=0.1 and predator weights w13=0.1, w23=1.",
  "patches": [
    {
      "model": "rosenzweig_macarthur",
      "params": {
        "gamma": 0.23076923076923078,
        "beta": 0.1,
        "alpha": 0.16666666666666666
      }
    },
    {
      "model": "ratio_dependent",
      "params": {
        "c": 1.8,
        "b": 1.8,
        "m": 0.25
      }
    },
    {
      "model": "rosenzweig_macarthur",
      "params": {
        "gamma": 0.23076923076923078,
        "beta": 0.1,
        "alpha": 0.16666666666666666
      }
    }
  ],
  "layers": [
    {
      "variable": 1,
      "edges": [
        {
          "u": 1,
          "v": 2,
          "w": 0.0
        },
        {
          "u": 1,
          "v": 3,
          "w": 0.1
        },
        {
          "u": 2,
          "v": 3,
          "w": 0.1
        }
      ]
    },
    {
      "variable": 2,
      "edges": [
        {
          "u": 1,
          "v": 2,
          "w": 0.0
        },
        {
          "u": 1,
          "v": 3,
          "w": 0.1
        },
        {
          "u": 2,
          "v": 3,
          "w": 1.0
        }
      ]
    }
  ],
  "equilibrium": {
    "per_patch": [
      0.2,
      0.16
    ]
  },
  "analysis": {
    "epsilon": 0.0,
    "basis_scaling": 1e-06,
    "sim": {
      "delta": 0.001,
      "horizon": 2000.0,
      "trials": 8,
      "seed": 1
    }
  },
  "reference": {
    "spectrum": [
      [
        -2.0956,
        0
      ],
      [
        -1.1125,
        0
      ],
      [
        -0.8845,
        0
      ],
      [
        -0.1364,
        0
      ],
      [
        0.0367,
        0.1021
      ],
      [
        0.0367,
        -0.1021
      ]
    ],
    "note": "published values, rounded as printed"
  }
}
)json"},
    {"example2_set1", R"json({
  "version": 1,
  "name": "example2_set1",
  "description": "Five patches: Lotka-Volterra at v1, Rosenzweig-MacArthur at v2..v5. Prey and predator layers differ on edges 1-4 and 3-4.",
  "patches": [
    {
      "model": "lotka_volterra",
      "params": {
        "r": 5.5,
        "c": 4.9,
        "b": 0.7,
        "m": 0.3
      }
    },
    {
      "model": "rosenzweig_macarthur",
      "params": {
        "gamma": 2.0,
        "beta": 0.2,
        "alpha": 0.3
      }
    },
    {
      "model": "rosenzweig_macarthur",
      "params": {
        "gamma": 2.0,
        "beta": 0.2,
        "alpha": 0.3
      }
    },
    {
      "model": "rosenzweig_macarthur",
      "params": {
        "gamma": 2.0,
        "beta": 0.2,
        "alpha": 0.3
      }
    },
    {
      "model": "rosenzweig_macarthur",
      "params": {
        "gamma": 2.0,
        "beta": 0.2,
        "alpha": 0.3
      }
    }
  ],
  "layers": [
    {
      "variable": 1,
      "edges": [
        {
          "u": 1,
          "v": 2,
          "w": 2.0
        },
        {
          "u": 1,
          "v": 3,
          "w": 1.0
        },
        {
          "u": 1,
          "v": 4,
          "w": 2.0
        },
        {
          "u": 2,
          "v": 3,
          "w": 1.0
        },
        {
          "u": 2,
          "v": 5,
          "w": 2.0
        },
        {
          "u": 3,
          "v": 4,
          "w": 1.0
        },
        {
          "u": 3,
          "v": 5,
          "w": 1.0
        }
      ]
    },
    {
      "variable": 2,
      "edges": [
        {
          "u": 1,
          "v": 2,
          "w": 2.0
        },
        {
          "u": 1,
          "v": 3,
          "w": 1.0
        },
        {
          "u": 1,
          "v": 4,
          "w": 1.0
        },
        {
          "u": 2,
          "v": 3,
          "w": 1.0
        },
        {
          "u": 2,
          "v": 5,
          "w": 2.0
        },
        {
          "u": 3,
          "v": 4,
          "w": 2.0
        },
        {
          "u": 3,
          "v": 5,
          "w": 1.0
        }
      ]
    }
  ],
  "equilibrium": {
    "solve_from": [
      0.5,
      1.0
    ]
  },
  "analysis": {
    "epsilon": 0.0,
    "basis_scaling": 1e-06
  },
  "reference": {
    "spectrum": [
      [
        -7.74564305,
        0.65231653
      ],
      [
        -7.74564305,
        -0.65231653
      ],
      [
        -5.02531764,
        0.51750868
      ],
      [
        -5.02531764,
        -0.51750868
      ],
      [
        -4.98928571,
        0.18134278
      ],
      [
        -4.98928571,
        -0.18134278
      ],
      [
        -2.16972237,
        0.26192349
      ],
      [
        -2.16972237,
        -0.26192349
      ],
      [
        -0.02717408,
        0.39736402
      ],
      [
        -0.02717408,
        -0.39736402
      ]
    ],
    "note": "published values"
  }
}
)json"},
    {"example2_set2", R"json({
  "version": 1,
  "name": "example2_set2",
  "description": "Example 2 patches with weak dispersal (0.01) except d23=1 and d34=1 on both layers.",
  "patches": [
    {
      "model": "lotka_volterra",
      "params": {
        "r": 5.5,
        "c": 4.9,
        "b": 0.7,
        "m": 0.3
      }
    },
    {
      "model": "rosenzweig_macarthur",
      "params": {
        "gamma": 2.0,
        "beta": 0.2,
        "alpha": 0.3
      }
    },
    {
      "model": "rosenzweig_macarthur",
      "params": {
        "gamma": 2.0,
        "beta": 0.2,
        "alpha": 0.3
      }
    },
    {
      "model": "rosenzweig_macarthur",
      "params": {
        "gamma": 2.0,
        "beta": 0.2,
        "alpha": 0.3
      }
    },
    {
      "model": "rosenzweig_macarthur",
      "params": {
        "gamma": 2.0,
        "beta": 0.2,
        "alpha": 0.3
      }
    }
  ],
  "layers": [
    {
      "variable": 1,
      "edges": [
        {
          "u": 1,
          "v": 2,
          "w": 0.01
        },
        {
          "u": 1,
          "v": 3,
          "w": 0.01
        },
        {
          "u": 1,
          "v": 4,
          "w": 0.01
        },
        {
          "u": 2,
          "v": 3,
          "w": 1.0
        },
        {
          "u": 2,
          "v": 5,
          "w": 0.01
        },
        {
          "u": 3,
          "v": 4,
          "w": 1.0
        },
        {
          "u": 3,
          "v": 5,
          "w": 0.01
        }
      ]
    },
    {
      "variable": 2,
      "edges": [
        {
          "u": 1,
          "v": 2,
          "w": 0.01
        },
        {
          "u": 1,
          "v": 3,
          "w": 0.01
        },
        {
          "u": 1,
          "v": 4,
          "w": 0.01
        },
        {
          "u": 2,
          "v": 3,
          "w": 1.0
        },
        {
          "u": 2,
          "v": 5,
          "w": 0.01
        },
        {
          "u": 3,
          "v": 4,
          "w": 1.0
        },
        {
          "u": 3,
          "v": 5,
          "w": 0.01
        }
      ]
    }
  ],
  "equilibrium": {
    "per_patch": [
      0.42857142857142855,
      1.1224489795918366
    ]
  },
  "analysis": {
    "epsilon": 0.0,
    "basis_scaling": 1e-06
  },
  "reference": {
    "spectrum": [
      [
        -3.0076306,
        0.18134278
      ],
      [
        -3.0076306,
        -0.18134278
      ],
      [
        -1.00434929,
        0.18134278
      ],
      [
        -1.00434929,
        -0.18134278
      ],
      [
        -0.03000593,
        1.28425135
      ],
      [
        -0.03000593,
        -1.28425135
      ],
      [
        -0.0192113,
        0.18145965
      ],
      [
        -0.0192113,
        -0.18145965
      ],
      [
        0.00405427,
        0.18149818
      ],
      [
        0.00405427,
        -0.18149818
      ]
    ],
    "note": "published values"
  }
}
)json"},
}};

[[nodiscard]] constexpr std::optional<std::string_view> builtin_scenario(std::string_view name) {
  for (const auto& b : kBuiltinScenarios)
    if (b.name == name) return b.json;
  return std::nullopt;
}

}  // namespace netstab
