//! Paired regular/UV fixtures with hand-built expected masks.
//!
//! Scene characters: `.` table, `o` bag, `r` red glow on bag, `m` magenta-red
//! glow on bag, `d` dim red on bag, `y` yellow on bag, `g` green glow on bag,
//! `R`/`G` red/green glow on the table. Expected characters: `.` background,
//! `o` bag, `r` rim, `h` handle.

pub struct UvFixture {
    pub name: &'static str,
    pub dilation_radius: u32,
    pub min_component: usize,
    pub scene: &'static [&'static str],
    pub expected: &'static [&'static str],
}

pub const UV_FIXTURES: [UvFixture; 20] = [
    UvFixture {
        name: "all_dark",
        dilation_radius: 0,
        min_component: 1,
        scene: &["..........", "..oooooo..", "..oooooo..", "..oooooo..", ".........."],
        expected: &["..........", "..oooooo..", "..oooooo..", "..oooooo..", ".........."],
    },
    UvFixture {
        name: "green_patch",
        dilation_radius: 0,
        min_component: 1,
        scene: &["..........", ".oooooooo.", ".oogggooo.", ".oogggooo.", ".oogggooo.", ".oooooooo.", ".........."],
        expected: &["..........", ".oooooooo.", ".oohhhooo.", ".oohhhooo.", ".oohhhooo.", ".oooooooo.", ".........."],
    },
    UvFixture {
        name: "red_stroke",
        dilation_radius: 0,
        min_component: 1,
        scene: &["..........", ".oooooooo.", ".orrrrrro.", ".oooooooo.", ".........."],
        expected: &["..........", ".oooooooo.", ".orrrrrro.", ".oooooooo.", ".........."],
    },
    UvFixture {
        name: "gap2_joins_r1",
        dilation_radius: 1,
        min_component: 1,
        scene: &["............", ".oooooooooo.", ".orrroorrro.", ".oooooooooo.", ".oooooooooo.", "............"],
        expected: &["............", ".orrroorrro.", ".rrrrrrrrrr.", ".orrroorrro.", ".oooooooooo.", "............"],
    },
    UvFixture {
        name: "gap4_joins_r2",
        dilation_radius: 2,
        min_component: 1,
        scene: &["..............", ".oooooooooooo.", ".oooooooooooo.", ".orroooorrooo.", ".oooooooooooo.", ".oooooooooooo.", ".............."],
        expected: &["..............", ".orroooorrooo.", ".rrrroorrrroo.", "rrrrrrrrrrrro.", ".rrrroorrrroo.", ".orroooorrooo.", ".............."],
    },
    UvFixture {
        name: "handle_beats_rim",
        dilation_radius: 1,
        min_component: 1,
        scene: &["..........", ".oooooooo.", ".oorogooo.", ".oorogooo.", ".oooooooo.", ".........."],
        expected: &["..........", ".oorohooo.", ".orrhhhoo.", ".orrhhhoo.", ".oorohooo.", ".........."],
    },
    UvFixture {
        name: "speck_removed_r0",
        dilation_radius: 0,
        min_component: 3,
        scene: &["..........", ".oooooooo.", ".oroooooo.", ".oooorrro.", ".oooooooo.", ".........."],
        expected: &["..........", ".oooooooo.", ".oooooooo.", ".oooorrro.", ".oooooooo.", ".........."],
    },
    UvFixture {
        name: "dilated_speck_removed",
        dilation_radius: 1,
        min_component: 6,
        scene: &["..........", ".oooooooo.", ".oooooooo.", ".ooorooooo", ".oooooooo.", ".........."],
        expected: &["..........", ".oooooooo.", ".oooooooo.", ".ooooooooo", ".oooooooo.", ".........."],
    },
    UvFixture {
        name: "hue_wrap_magenta",
        dilation_radius: 0,
        min_component: 1,
        scene: &["........", ".oooooo.", ".ommmmo.", ".oooooo.", "........"],
        expected: &["........", ".oooooo.", ".orrrro.", ".oooooo.", "........"],
    },
    UvFixture {
        name: "dim_red_ignored",
        dilation_radius: 0,
        min_component: 1,
        scene: &["........", ".oooooo.", ".odddro.", ".oooooo.", "........"],
        expected: &["........", ".oooooo.", ".ooooro.", ".oooooo.", "........"],
    },
    UvFixture {
        name: "yellow_ignored",
        dilation_radius: 0,
        min_component: 1,
        scene: &["........", ".oooooo.", ".oyyggo.", ".oooooo.", "........"],
        expected: &["........", ".oooooo.", ".ooohho.", ".oooooo.", "........"],
    },
    UvFixture {
        name: "glow_off_bag",
        dilation_radius: 0,
        min_component: 1,
        scene: &["..RR....", ".oooooo.", ".oooooo.", "....GG..", "........"],
        expected: &["..rr....", ".oooooo.", ".oooooo.", "....hh..", "........"],
    },
    UvFixture {
        name: "border_clip_r1",
        dilation_radius: 1,
        min_component: 1,
        scene: &["rooooo..", "oooooo..", "oooooo..", "......gG"],
        expected: &["rroooo..", "rooooo..", "oooooohh", ".....hhh"],
    },
    UvFixture {
        name: "l_shape_r1",
        dilation_radius: 1,
        min_component: 1,
        scene: &["..........", ".oooooooo.", ".orooooooo", ".orooooooo", ".orrrroooo", ".oooooooo.", ".........."],
        expected: &["..........", ".oroooooo.", ".rrroooooo", ".rrrrroooo", ".rrrrrrooo", ".orrrrooo.", ".........."],
    },
    UvFixture {
        name: "small_handle_dropped",
        dilation_radius: 0,
        min_component: 4,
        scene: &["............", ".oooooooooo.", ".oggoooggoo.", ".ogoooogggo.", ".oooooooooo.", "............"],
        expected: &["............", ".oooooooooo.", ".oooooohhoo.", ".oooooohhho.", ".oooooooooo.", "............"],
    },
    UvFixture {
        name: "rim_ring_r0",
        dilation_radius: 0,
        min_component: 1,
        scene: &["..........", ".oooooooo.", ".orrrrrro.", ".orooooro.", ".orooooro.", ".orrrrrro.", ".oooooooo.", ".........."],
        expected: &["..........", ".oooooooo.", ".orrrrrro.", ".orooooro.", ".orooooro.", ".orrrrrro.", ".oooooooo.", ".........."],
    },
    UvFixture {
        name: "diagonal_kept",
        dilation_radius: 0,
        min_component: 3,
        scene: &["........", ".oooooo.", ".roooooo", ".oroooo.", ".oorooo.", "........"],
        expected: &["........", ".oooooo.", ".roooooo", ".oroooo.", ".oorooo.", "........"],
    },
    UvFixture {
        name: "adjacent_no_dilation",
        dilation_radius: 0,
        min_component: 1,
        scene: &["........", ".oooooo.", ".orrggo.", ".orrggo.", ".oooooo.", "........"],
        expected: &["........", ".oooooo.", ".orrhho.", ".orrhho.", ".oooooo.", "........"],
    },
    UvFixture {
        name: "vertical_gap2_r1",
        dilation_radius: 1,
        min_component: 1,
        scene: &["........", ".oooooo.", ".ooroo..", ".oooooo.", ".oooooo.", ".ooroo..", ".oooooo.", "........"],
        expected: &["........", ".oorooo.", ".orrro..", ".oorooo.", ".oorooo.", ".orrro..", ".oorooo.", "........"],
    },
    UvFixture {
        name: "mixed_r1_m4",
        dilation_radius: 1,
        min_component: 4,
        scene: &["..............", ".oooooooooooo.", ".orrroooooooo.", ".ooooooogoooo.", ".oooooooooooo.", ".ooooroooooor.", ".oooooooooooo.", ".............."],
        expected: &["..............", ".orrroooooooo.", ".rrrrroohoooo.", ".orrroohhhooo.", ".ooooroohooor.", ".ooorrroooorrr", ".ooooroooooor.", ".............."],
    },
];
