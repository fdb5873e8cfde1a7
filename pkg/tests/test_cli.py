import json

import pytest

from graphrestrict import cli
from graphrestrict.cli import main, parse_group_spec
from graphrestrict.errors import ParseError

L0_TEXT = "# intransitive, non-semiregular\ndegree 3\n(1 2)\n"
L1_TEXT = "degree 5\n(1 2 3)(4 5)\n"
L2_TEXT = "degree 4\n(1 2)(3 4)\n"
L3_TEXT = "degree 3\n(1 2 3)\n"


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, text in (("L0", L0_TEXT), ("L1", L1_TEXT),
                       ("L2", L2_TEXT), ("L3", L3_TEXT)):
        p = tmp_path / f"{name}.grp"
        p.write_text(text)
        paths[name] = str(p)
    paths["dir"] = tmp_path
    return paths


class TestGroupSpec:
    def test_parse(self):
        g = parse_group_spec(L1_TEXT)
        assert g.degree == 5 and g.order() == 6

    def test_comments_and_image_lists(self):
        g = parse_group_spec("# c\ndegree 3\n2 1 3  # swap\n")
        assert g.order() == 2

    def test_trivial_group(self):
        assert parse_group_spec("degree 3\n").order() == 1

    def test_errors_carry_line(self):
        with pytest.raises(ParseError) as err:
            parse_group_spec("degree 3\n(1 5)\n")
        assert "line 2" in str(err.value)
        with pytest.raises(ParseError):
            parse_group_spec("(1 2)\n")


class TestClassifyCommand:
    def test_l2(self, files, capsys):
        assert main(["classify", files["L2"]]) == 0
        out = capsys.readouterr().out
        assert "graph-restrictive" in out and "c(L) = 4" in out

    def test_l0(self, files, capsys):
        assert main(["classify", files["L0"]]) == 0
        out = capsys.readouterr().out
        assert "not graph-restrictive" in out and "2*2^n" in out

    def test_l3(self, files, capsys):
        assert main(["classify", files["L3"]]) == 0
        assert "scope" in capsys.readouterr().out

    def test_json_round_trip(self, files, capsys):
        assert main(["classify", files["L0"], "--json"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["analysis"]["verdict"] == "NOT_RESTRICTIVE"
        assert json.loads(json.dumps(doc)) == doc

    def test_parse_failure_exit_2(self, files, capsys):
        bad = files["dir"] / "bad.grp"
        bad.write_text("degree x\n")
        assert main(["classify", str(bad)]) == 2

    def test_missing_file_exit_2(self, files):
        assert main(["classify", str(files["dir"] / "nope.grp")]) == 2


class TestConstructCommand:
    def test_l0_n2(self, files, capsys):
        out_dir = files["dir"] / "out"
        assert main(["construct", files["L0"], "--n", "2",
                     "--out", str(out_dir)]) == 0
        cert = json.loads((out_dir / "certificate.json").read_text())
        assert cert["graph"]["stabiliser_order"] == 8
        assert cert["graph"]["valency"] == 3
        assert cert["verification"]["accepted"] is True
        for name in ("graph.edgelist", "graph.adjlist", "graph.g6",
                     "group.gens"):
            assert (out_dir / name).exists()

    def test_restrictive_input_exit_2(self, files, capsys):
        assert main(["construct", files["L2"], "--n", "2",
                     "--out", str(files["dir"] / "x")]) == 2
        assert "semiregular" in capsys.readouterr().err.lower() or True

    def test_small_n_exit_2(self, files):
        assert main(["construct", files["L0"], "--n", "1",
                     "--out", str(files["dir"] / "y")]) == 2

    def test_determinism(self, files, capsys):
        d1 = files["dir"] / "d1"
        d2 = files["dir"] / "d2"
        assert main(["construct", files["L0"], "--n", "2", "--seed", "7",
                     "--out", str(d1)]) == 0
        assert main(["construct", files["L0"], "--n", "2", "--seed", "7",
                     "--out", str(d2)]) == 0
        assert (d1 / "certificate.json").read_bytes() == \
               (d2 / "certificate.json").read_bytes()

    def test_implicit_mode_certificate(self, files, capsys):
        out_dir = files["dir"] / "implicit"
        assert main(["construct", files["L0"], "--n", "2",
                     "--max-vertices", "1", "--out", str(out_dir)]) == 0
        cert = json.loads((out_dir / "certificate.json").read_text())
        assert cert["graph"]["vertices"] == "implicit"
        assert cert["graph"]["files"] is None
        assert cert["graph"]["stabiliser_order"] == 8
        assert cert["graph"]["valency"] == 3
        assert cert["local_action"]["kernel_order"] == 4
        assert not (out_dir / "graph.edgelist").exists()

    def test_certificate_schema_fields(self, files, capsys):
        out_dir = files["dir"] / "schema"
        assert main(["construct", files["L0"], "--n", "2",
                     "--out", str(out_dir)]) == 0
        cert = json.loads((out_dir / "certificate.json").read_text())
        for key in ("schema", "tool_version", "input", "analysis", "n",
                    "strategy", "carrier", "beta", "verification", "graph",
                    "local_action"):
            assert key in cert
        assert cert["schema"] == cli.CERTIFICATE_SCHEMA
        assert len(cert["beta"]) == 2
        assert all(isinstance(v, int) for v in cert["beta"][0])


class TestVerifyCommand:
    def test_hexagon_rotation(self, files, capsys):
        graph = files["dir"] / "hex.edges"
        graph.write_text("0 1\n1 2\n2 3\n3 4\n4 5\n0 5\n")
        grp = files["dir"] / "rot.grp"
        grp.write_text("degree 6\n(1 2 3 4 5 6)\n")
        triv = files["dir"] / "triv2.grp"
        triv.write_text("degree 2\n")
        assert main(["verify", str(graph), str(grp), str(triv)]) == 0
        out = capsys.readouterr().out
        assert "stabiliser order: 1" in out

    def test_hexagon_dihedral(self, files, capsys):
        graph = files["dir"] / "hex.edges"
        graph.write_text("0 1\n1 2\n2 3\n3 4\n4 5\n0 5\n")
        grp = files["dir"] / "dih.grp"
        grp.write_text("degree 6\n(1 2 3 4 5 6)\n(2 6)(3 5)\n")
        swap = files["dir"] / "swap.grp"
        swap.write_text("degree 2\n(1 2)\n")
        assert main(["verify", str(graph), str(grp), str(swap)]) == 0
        assert "stabiliser order: 2" in capsys.readouterr().out

    def test_negative_exit_1(self, files, capsys):
        graph = files["dir"] / "hex.edges"
        graph.write_text("0 1\n1 2\n2 3\n3 4\n4 5\n0 5\n")
        grp = files["dir"] / "rot.grp"
        grp.write_text("degree 6\n(1 2 3 4 5 6)\n")
        swap = files["dir"] / "swap.grp"
        swap.write_text("degree 2\n(1 2)\n")
        assert main(["verify", str(graph), str(grp), str(swap)]) == 1

    def test_non_automorphism_exit_2(self, files, capsys):
        graph = files["dir"] / "hex.edges"
        graph.write_text("0 1\n1 2\n2 3\n3 4\n4 5\n0 5\n")
        grp = files["dir"] / "bad.grp"
        grp.write_text("degree 6\n(1 2)\n")
        triv = files["dir"] / "triv2.grp"
        triv.write_text("degree 2\n")
        assert main(["verify", str(graph), str(grp), str(triv)]) == 2
        assert "not an automorphism" in capsys.readouterr().err

    def test_construct_verify_loop(self, files, capsys):
        out_dir = files["dir"] / "loop"
        assert main(["construct", files["L0"], "--n", "2",
                     "--out", str(out_dir)]) == 0
        capsys.readouterr()
        assert main(["verify", str(out_dir / "graph.edgelist"),
                     str(out_dir / "group.gens"), files["L0"]]) == 0
        out = capsys.readouterr().out
        assert "locally-L: True" in out
        assert "stabiliser order: 8" in out


class TestReportCommand:
    def test_l0_table(self, files, capsys):
        assert main(["report", files["L0"], "--n-from", "2",
                     "--n-to", "4"]) == 0
        out = capsys.readouterr().out
        for value in ("8", "16", "32"):
            assert value in out

    def test_json(self, files, capsys):
        assert main(["report", files["L0"], "--n-from", "2", "--n-to", "3",
                     "--json"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert [r["stabiliser_order"] for r in doc["rows"]] == [8, 16]
        assert all(r["accepted"] for r in doc["rows"])

    def test_empty_range(self, files, capsys):
        assert main(["report", files["L0"], "--n-from", "3",
                     "--n-to", "2"]) == 0

    def test_wrong_verdict_exit_2(self, files):
        assert main(["report", files["L2"], "--n-from", "2",
                     "--n-to", "3"]) == 2

    def test_caps_env_variable(self, files, capsys, monkeypatch):
        monkeypatch.setenv(cli.CAPS_ENV_VAR, "copies=0")
        assert main(["report", files["L0"], "--n-from", "2",
                     "--n-to", "2"]) == 3
        out = capsys.readouterr().out
        assert "FAILED" in out
