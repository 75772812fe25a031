//! Built-in scenarios, one per model preset.

pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    pub toml: &'static str,
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "finite-affine",
        summary: "two-state chain with Q_u = (1-u)A + uB; exact laws and mixing",
        toml: r#"version = 1
experiment = "bounds"
n_list = [100, 200, 400, 800]
u_grid = [0.25, 0.5, 0.75]
replicates = 1
seed = 1
output_dir = "out/finite-affine"

[bandwidth_rule]
c = 1.0
exponent = 0.2

[model]
preset = "finite-affine"
a = [[0.7, 0.3], [0.4, 0.6]]
b = [[0.5, 0.5], [0.2, 0.8]]
holder = 0.2
"#,
    },
    Preset {
        name: "random-walk",
        summary: "reflected walk on N with (p,q,r) = (0.15+0.1u, 0.5, 0.35-0.1u), V(x) = 1.3^x",
        toml: r#"version = 1
experiment = "certify"
n_list = [100, 200, 400, 800]
u_grid = [0.25, 0.5, 0.75]
replicates = 1
seed = 1
output_dir = "out/random-walk"

[model]
preset = "random-walk"
p = { poly = [0.15, 0.1] }
q = 0.5
r = { poly = [0.35, -0.1] }
truncation = 80
z = 1.3
epsilon = 0.05
holder = 0.1
"#,
    },
    Preset {
        name: "inar1",
        summary: "tv-INAR(1) with alpha(u) = 0.3+0.2u and lambda(u) = 1+u",
        toml: r#"version = 1
experiment = "bounds"
n_list = [100, 200, 400]
u_grid = [0.25, 0.5, 0.75]
replicates = 1
seed = 1
output_dir = "out/inar1"

[model]
preset = "inar1"
alpha = [{ poly = [0.3, 0.2] }]
lambda = { poly = [1.0, 1.0] }
truncation = 40
holder = 1.0
"#,
    },
    Preset {
        name: "tv-ar1",
        summary: "X_i = a(i/n) X_{i-1} + xi_i with a(u) = 0.5+0.3u",
        toml: r#"version = 1
experiment = "bounds"
n_list = [500, 1000, 2000, 4000]
u_grid = [0.5]
replicates = 500
seed = 1
output_dir = "out/tv-ar1"

[model]
preset = "tv-ar1"
a = { poly = [0.5, 0.3] }
sigma = 1.0
holder = 0.3
"#,
    },
    Preset {
        name: "tv-arch1-squared",
        summary: "X_i = xi_i^2 (a0 + a1(i/n) X_{i-1}) with a1(u) = 0.2+0.3u",
        toml: r#"version = 1
experiment = "mixing"
n_list = [400]
u_grid = [0.5]
replicates = 400
seed = 1
jmax = 12
output_dir = "out/tv-arch1-squared"

[model]
preset = "tv-arch1-squared"
a0 = 0.1
a1 = { poly = [0.2, 0.3] }
holder = 0.3
"#,
    },
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}
