//! The bundled worked cases.

pub struct Fixture {
    pub name: &'static str,
    pub file: &'static str,
    pub summary: &'static str,
    pub source: &'static str,
}

pub const FIXTURES: &[Fixture] = &[
    Fixture {
        name: "case1",
        file: "case1_table.dkb",
        summary: "a table whose fourth leg is replaced, and the wood that constitutes it",
        source: include_str!("../../cases/case1_table.dkb"),
    },
    Fixture {
        name: "case2",
        file: "case2_roles.dkb",
        summary: "teacher and student roles, one of them functional",
        source: include_str!("../../cases/case2_roles.dkb"),
    },
    Fixture {
        name: "case3.1",
        file: "case3_1_flower.dkb",
        summary: "a flower whose colour moves from red to brown along a path of shades",
        source: include_str!("../../cases/case3_1_flower.dkb"),
    },
    Fixture {
        name: "case3.2",
        file: "case3_2_speed.dkb",
        summary: "a walk, a run and a speed-up inside one movement",
        source: include_str!("../../cases/case3_2_speed.dkb"),
    },
    Fixture {
        name: "case4",
        file: "case4_plans.dkb",
        summary: "a turning manoeuvre executing two plans in sequence",
        source: include_str!("../../cases/case4_plans.dkb"),
    },
    Fixture {
        name: "case5",
        file: "case5_marriage.dkb",
        summary: "a social marriage that requires different legal marriages over time",
        source: include_str!("../../cases/case5_marriage.dkb"),
    },
];

pub fn fixture(name: &str) -> Option<&'static Fixture> {
    FIXTURES.iter().find(|f| f.name == name || f.file == name)
}
