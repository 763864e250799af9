#!/usr/bin/env python3
"""Regenerate include/socioscope/detail/mcc_table.hpp from data/mcc_directory.csv."""
import csv
import pathlib

root = pathlib.Path(__file__).resolve().parent.parent
rows = list(csv.DictReader(open(root / "data" / "mcc_directory.csv")))

out = [
    "// Generated by tools/gen_mcc_table.py from data/mcc_directory.csv. Do not edit.",
    "#pragma once",
    "",
    "#include <array>",
    "#include <string_view>",
    "",
    "namespace socioscope::detail {",
    "",
    "struct MccRow {",
    "  int mcc;",
    "  std::string_view name;",
    "  std::string_view pcg;",
    "};",
    "",
    f"inline constexpr std::array<MccRow, {len(rows)}> kMccTable{{{{",
]
for r in rows:
    name = r["name"].replace("\\", "\\\\").replace('"', '\\"')
    out.append(f'    {{{r["mcc"]}, "{name}", "{r["pcg"]}"}},')
out += ["}};", "", "}  // namespace socioscope::detail", ""]
(root / "include" / "socioscope" / "detail" / "mcc_table.hpp").write_text("\n".join(out))
