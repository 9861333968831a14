"""End-to-end tests for the text front end and its subcommands."""

import json
import os

import pytest

from gfc.cli import main, parse, term_source
from gfc.errors import ParseError
from gfc.rewrite import sgnt0_canonicalize


DATA = os.path.join(os.path.dirname(__file__), "data")


def data(name):
    return os.path.join(DATA, name)


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


# parsing -----------------------------------------------------------------


def test_empty_source_parses():
    doc = parse("")
    assert not doc.session.named_spaces
    assert not doc.checks


def test_declarations_build_session():
    doc = parse("""
        # a small site with one fibre product
        space X; space Y;
        map f : X -> Y;
        iso w : Y -> Y;
        map tX = terminal(X);
        map tY = terminal(Y);
        pullback P (pY, pX) of (tX, tY);
        pushgeoloc {f};
        pullgeoloc {f, w};
        mono {f};
        acyclic (f, f);
        model M { X = {1, 2}; Y = {a}; f = {1 -> a, 2 -> a}; w = {a -> a}; }
    """)
    s = doc.session
    assert set(s.named_spaces) >= {"X", "Y", "P"}
    assert set(s.named_maps) >= {"f", "w", "tX", "tY", "pY", "pX"}
    assert "P" in doc.squares
    f, w = s.named_maps["f"], s.named_maps["w"]
    assert doc.push == [f] and doc.pull == [f, w] and doc.mono == [f]
    assert doc.acyclic_pairs == [(f, f)]
    assert len(doc.models) == 1
    st = doc.structure()
    assert st.model is doc.models[0]


def test_word_letters_accept_paths_and_terminal():
    doc = parse("""
        space X; space Y; space Z;
        map f : X -> Y; map g : Y -> Z;
        sgf W = terminal(Z)_* (f . g)_*;
        sgf V = id(X);
    """)
    w = doc.sgfs["W"]
    assert len(w) == 2
    assert w.src_space.label() == "X"
    assert len(doc.sgfs["V"]) == 0


def test_chain_mismatch_names_both_spaces():
    with pytest.raises(ParseError, match="cannot chain") as exc:
        parse("""
            space Alpha; space Beta; space Gamma;
            map f : Alpha -> Beta; map g : Beta -> Gamma;
            sgf W = f^* g_*;
        """)
    assert "Beta" in str(exc.value) and "Gamma" in str(exc.value)


def test_reserved_names_rejected():
    with pytest.raises(ParseError, match="reserved word"):
        parse("space unit;")


def test_duplicate_declarations_rejected():
    with pytest.raises(ParseError, match="already declared"):
        parse("space X; space X;")
    with pytest.raises(ParseError, match="already declared"):
        parse("space X; map f : X -> X; map f = f . f;")


def test_unknown_map_in_word():
    with pytest.raises(ParseError, match="unknown map 'h'"):
        parse("space X; sgf W = h_*;")


def test_relation_after_composite_rejected():
    with pytest.raises(ParseError):
        parse("""
            space X;
            map f : X -> X;
            map ff = f . f;
            relation f.f = f;
        """)


def test_group_allows_at_most_one_cell():
    with pytest.raises(ParseError, match="at most one cell"):
        parse("""
            space X; space Y;
            map f : X -> Y;
            sgnt t = (unit(f) counit(f));
        """)


def test_acyclic_all_needs_a_model():
    doc = parse("space X; acyclic all;")
    with pytest.raises(ParseError, match="needs a declared finite model"):
        doc.structure()


def test_check_endpoints_verified_at_parse_time(tmp_path, capsys):
    p = tmp_path / "bad.gfc"
    p.write_text("""
        space X; space Y;
        map f : X -> Y;
        sgf W = f_*;
        check id(W) == id(X);
    """)
    code, _, err = run(["check", str(p)], capsys)
    assert code == 3
    assert "check endpoints differ" in err


# check -------------------------------------------------------------------


@pytest.mark.parametrize("name, expected", [
    ("assoc.gfc", 0),
    ("cohom.gfc", 0),
    ("cup.gfc", 0),
    ("2111.gfc", 0),
    ("2112.gfc", 0),
    ("balmer.gfc", 1),
    ("unknown_hyp.gfc", 2),
])
def test_check_exit_codes(name, expected, capsys):
    code, _, _ = run(["check", data(name)], capsys)
    assert code == expected


def test_check_reports_the_deciding_rule(capsys):
    _, out, _ = run(["check", data("assoc.gfc")], capsys)
    assert out.splitlines()[0] == (
        "check 1: left == right: equal  [composition-trivialisation-uniqueness]")
    _, out, _ = run(["check", data("2112.gfc")], capsys)
    assert out.splitlines()[0] == (
        "check 1: whole == twostep: equal  [roof-codomain-uniqueness]")


def test_check_unequal_prints_the_separating_family(capsys):
    _, out, _ = run(["check", data("balmer.gfc")], capsys)
    lines = out.splitlines()
    assert lines[0] == "check 1: phi == id(W): unequal  [counterexample-search]"
    assert lines[1] == ("  separating family at element [1]: "
                        "[['1', '0'], ['1', '0']] != [['1', '0'], ['0', '1']]")
    assert any("hypothesis 'weak admissibility' not established" in l
               for l in lines)


def test_check_unknown_names_the_failed_hypothesis(capsys):
    _, out, _ = run(["check", data("unknown_hyp.gfc")], capsys)
    assert out.splitlines()[0] == (
        "check 1: phi == id(Y): unknown  [counterexample-search]")
    assert "hypothesis 'goodness' not established" in out
    assert "not certified" in out


def test_check_json_output(capsys):
    code, out, _ = run(["check", data("balmer.gfc"), "--json"], capsys)
    assert code == 1
    recs = json.loads(out)
    assert len(recs) == 1
    rec = recs[0]
    assert rec["check"] == "phi == id(W)"
    assert rec["verdict"] == "unequal"
    assert rec["proof"] is None
    assert rec["trace"][-1] == "counterexample-search"
    assert rec["witness"]["element"] == [1]
    assert isinstance(rec["line"], int) and rec["line"] > 0
    assert any(d["hypothesis"] == "weak admissibility"
               for d in rec["diagnostics"])


def test_check_trace_flag(capsys):
    _, out, _ = run(["check", data("assoc.gfc"), "--trace"], capsys)
    assert "  trace: composition-trivialisation-uniqueness" in out


# normalize ---------------------------------------------------------------


def test_normalize_reduces_words(capsys):
    _, out, _ = run(["normalize", data("cohom.gfc"), "W"], capsys)
    assert out.strip() == "terminal(Z)_*"


def test_normalize_canonicalizes_terms(capsys):
    _, out, _ = run(["normalize", data("cohom.gfc"), "twostep"], capsys)
    assert out.strip() == "(comp_*(f, pX))"
    _, out, _ = run(["normalize", data("2112.gfc"), "twostep"], capsys)
    assert out.strip() == "(bc(GPB))"


def test_normalize_output_reparses_to_the_same_form(capsys):
    _, out, _ = run(["normalize", data("cohom.gfc"), "twostep"], capsys)
    src = open(data("cohom.gfc")).read()
    doc = parse(src + "\nsgnt canon = %s;\n" % out.strip())
    again = term_source(sgnt0_canonicalize(doc.sgnts["canon"]))
    assert again == out.strip()


def test_normalize_echoes_terms_outside_the_ordered_fragment(capsys):
    _, out, _ = run(["normalize", data("unknown_hyp.gfc"), "phi"], capsys)
    assert out.strip() == "(unit(f)) . (unit(f)')"


def test_normalize_unknown_name(capsys):
    code, _, err = run(["normalize", data("cohom.gfc"), "nope"], capsys)
    assert code == 3
    assert "gfc: error:" in err


# roof --------------------------------------------------------------------


def test_roof_prints_apex_and_legs(capsys):
    _, out, _ = run(["roof", data("2112.gfc"), "W"], capsys)
    lines = out.splitlines()
    assert lines[0] == "roof of W"
    assert lines[1] == "  apex: GPB"
    assert lines[2] == "  direct leg a: gf: GPB -> X"
    assert lines[3] == "  inverse leg b: bA: GPB -> ZX"
    assert lines[4] == "  word: gf_* bA^*"


def test_roof_json(capsys):
    _, out, _ = run(["roof", data("2112.gfc"), "W", "--json"], capsys)
    rec = json.loads(out)[0]
    assert rec == {"word": "W", "apex": "GPB", "a": "gf: GPB -> X",
                   "b": "bA: GPB -> ZX", "roof": "gf_* bA^*"}


def test_roof_statement_in_file(tmp_path, capsys):
    p = tmp_path / "r.gfc"
    p.write_text("""
        space X; space Y;
        map f : X -> Y;
        sgf W = f_* f^*;
        roof W;
    """)
    code, out, _ = run(["roof", str(p)], capsys)
    assert code == 0
    assert out.splitlines()[0] == "roof of W"


# render ------------------------------------------------------------------


def test_render_named_term_to_file(tmp_path, capsys):
    out_path = tmp_path / "phi.svg"
    code, out, _ = run(["render", data("balmer.gfc"), "phi",
                        "-o", str(out_path)], capsys)
    assert code == 0
    assert out.strip() == "wrote %s" % out_path
    svg = out_path.read_text()
    assert svg.startswith("<?xml")
    assert 'data-cell="counit"' in svg


def test_render_statement_in_file(tmp_path, capsys):
    out_path = tmp_path / "t.svg"
    p = tmp_path / "r.gfc"
    p.write_text("""
        space X; space Y;
        map f : X -> Y;
        sgnt phi = unit(f);
        render phi > %s;
    """ % out_path)
    code, out, _ = run(["render", str(p)], capsys)
    assert code == 0
    assert "<svg" in out_path.read_text()


def test_render_labels_flag(tmp_path, capsys):
    out_path = tmp_path / "l.svg"
    run(["render", data("balmer.gfc"), "phi", "-o", str(out_path),
         "--labels"], capsys)
    assert "<text" in out_path.read_text()


def test_render_named_term_needs_output(capsys):
    code, _, err = run(["render", data("balmer.gfc"), "phi"], capsys)
    assert code == 3
    assert "render needs -o" in err


# errors ------------------------------------------------------------------


def test_missing_file_is_a_cli_error(tmp_path, capsys):
    code, _, err = run(["check", str(tmp_path / "nope.gfc")], capsys)
    assert code == 3
    assert "gfc: error:" in err


def test_bad_usage_maps_to_exit_3(capsys):
    assert main(["frobnicate"]) == 3
    capsys.readouterr()


def test_parse_errors_carry_line_and_column(capsys):
    p = os.path.join(DATA, "..", "data")  # directory, not a file
    code, _, err = run(["check", p], capsys)
    assert code == 3
    with pytest.raises(ParseError, match=r"line \d+, column \d+"):
        parse("space X\nspace Y;")
