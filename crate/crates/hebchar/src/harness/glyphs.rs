//! Built-in 8x6 prototype glyphs for the 52 English letters.
//!
//! `A` is the extracted-pixels reference matrix; the remaining glyphs are
//! hand-drawn so that every pair differs in at least 4 of the 48 cells and
//! the crop-and-regrid pipeline keeps all 52 distinct.

use crate::preprocess::BinaryGrid;

pub const GLYPH_ROWS: usize = 8;
pub const GLYPH_COLS: usize = 6;

/// `#` marks a foreground cell.
#[rustfmt::skip]
pub(super) const GLYPHS: [(&str, [&str; GLYPH_ROWS]); 52] = [
    ("A", ["..##..", ".#..#.", "#....#", "#....#", "######", "#....#", "#....#", "#....#"]),
    ("B", ["#####.", "#....#", "#....#", "#####.", "#....#", "#....#", "#....#", "#####."]),
    ("C", [".####.", "#....#", "#.....", "#.....", "#.....", "#.....", "#....#", ".####."]),
    ("D", ["####..", "#...#.", "#....#", "#....#", "#....#", "#....#", "#...#.", "####.."]),
    ("E", ["######", "#.....", "#.....", "#####.", "#.....", "#.....", "#.....", "######"]),
    ("F", ["######", "#.....", "#.....", "####..", "#.....", "#.....", "#.....", "#....."]),
    ("G", [".####.", "#....#", "#.....", "#.....", "#..###", "#....#", "#....#", ".#####"]),
    ("H", ["#....#", "#....#", "#....#", "######", "#....#", "#....#", "#....#", "#....#"]),
    ("I", ["######", "..##..", "..##..", "..##..", "..##..", "..##..", "..##..", "######"]),
    ("J", [".#####", "....#.", "....#.", "....#.", "....#.", "#...#.", "#...#.", ".###.."]),
    ("K", ["#....#", "#...#.", "#..#..", "##....", "##....", "#..#..", "#...#.", "#....#"]),
    ("L", ["#.....", "#.....", "#.....", "#.....", "#.....", "#.....", "#.....", "######"]),
    ("M", ["#....#", "##..##", "#.##.#", "#.##.#", "#....#", "#....#", "#....#", "#....#"]),
    ("N", ["#....#", "##...#", "#.#..#", "#..#.#", "#...##", "#....#", "#....#", "#....#"]),
    ("O", [".####.", "#....#", "#....#", "#....#", "#....#", "#....#", "#....#", ".####."]),
    ("P", ["#####.", "#....#", "#....#", "#####.", "#.....", "#.....", "#.....", "#....."]),
    ("Q", [".####.", "#....#", "#....#", "#....#", "#....#", "#..#.#", "#...#.", ".###.#"]),
    ("R", ["#####.", "#....#", "#....#", "#####.", "#..#..", "#...#.", "#....#", "#....#"]),
    ("S", [".#####", "#.....", "#.....", ".####.", ".....#", ".....#", ".....#", "#####."]),
    ("T", ["######", "..##..", "..##..", "..##..", "..##..", "..##..", "..##..", "..##.."]),
    ("U", ["#....#", "#....#", "#....#", "#....#", "#....#", "#....#", "#....#", ".####."]),
    ("V", ["#....#", "#....#", "#....#", "#....#", ".#..#.", ".#..#.", "..##..", "..##.."]),
    ("W", ["#....#", "#....#", "#....#", "#....#", "#.##.#", "#.##.#", "##..##", "#....#"]),
    ("X", ["#....#", ".#..#.", "..##..", "..##..", "..##..", "..##..", ".#..#.", "#....#"]),
    ("Y", ["#....#", "#....#", ".#..#.", "..##..", "..##..", "..##..", "..##..", "..##.."]),
    ("Z", ["######", ".....#", "....#.", "...#..", "..#...", ".#....", "#.....", "######"]),
    ("a", ["......", "......", ".####.", ".....#", ".#####", "#....#", "#...##", ".###.#"]),
    ("b", ["#.....", "#.....", "#.....", "#.###.", "##...#", "#....#", "##...#", "#.###."]),
    ("c", ["......", "......", "..####", ".#....", "#.....", "#.....", ".#....", "..####"]),
    ("d", [".....#", ".....#", ".....#", ".###.#", "#...##", "#....#", "#...##", ".###.#"]),
    ("e", ["......", "......", ".####.", "#....#", "######", "#.....", "#....#", ".####."]),
    ("f", ["...##.", "..#...", "..#...", "#####.", "..#...", "..#...", "..#...", "..#..."]),
    ("g", ["......", ".###.#", "#...##", "#....#", "#...##", ".###.#", ".....#", ".####."]),
    ("h", ["#.....", "#.....", "#.....", "#.###.", "##...#", "#....#", "#....#", "#....#"]),
    ("i", ["..##..", "......", ".###..", "..##..", "..##..", "..##..", "..##..", ".####."]),
    ("j", ["....#.", "......", "...##.", "....#.", "....#.", "....#.", "#...#.", ".###.."]),
    ("k", ["#.....", "#.....", "#...#.", "#..#..", "###...", "#..#..", "#...#.", "#....#"]),
    ("l", [".##...", "..#...", "..#...", "..#...", "..#...", "..#...", "..#...", "..####"]),
    ("m", ["......", "......", "##.##.", "#.#..#", "#.#..#", "#.#..#", "#.#..#", "#.#..#"]),
    ("n", ["......", "......", "#.###.", "##...#", "#....#", "#....#", "#....#", "#....#"]),
    ("o", ["......", "......", ".####.", "#....#", "#....#", "#....#", "#....#", ".####."]),
    ("p", ["......", "#.###.", "##...#", "#....#", "##...#", "#.###.", "#.....", "#....."]),
    ("q", ["......", ".###.#", "#...##", "#....#", "#...##", ".###.#", ".....#", ".....#"]),
    ("r", ["......", "......", "#.###.", "##...#", "#.....", "#.....", "#.....", "#....."]),
    ("s", ["......", "......", ".#####", "#.....", ".####.", ".....#", ".....#", "#####."]),
    ("t", ["..#...", "..#...", "#####.", "..#...", "..#...", "..#...", "..#...", "...###"]),
    ("u", ["......", "......", "#....#", "#....#", "#....#", "#....#", "#...##", ".###.#"]),
    ("v", ["......", "......", "#....#", "#....#", ".#..#.", ".#..#.", "..##..", "..##.."]),
    ("w", ["......", "......", "#....#", "#....#", "#....#", "#.##.#", "##..##", ".#..#."]),
    ("x", ["......", "......", "#....#", ".#..#.", "..##..", "..##..", ".#..#.", "#....#"]),
    ("y", ["......", "......", "#....#", "#...##", ".###.#", ".....#", "#....#", ".####."]),
    ("z", ["......", "......", "######", "....#.", "...#..", "..#...", ".#....", "######"]),
];

pub(super) fn glyph_grid(rows: &[&str; GLYPH_ROWS]) -> BinaryGrid {
    let cells = rows
        .iter()
        .flat_map(|row| row.bytes().map(|b| u8::from(b == b'#')))
        .collect();
    BinaryGrid::new(GLYPH_ROWS, GLYPH_COLS, cells)
}
