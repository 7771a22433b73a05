import contextlib
import io as stdio
import json
import os
import tempfile
from importlib import resources

import pytest
from hypothesis import given, settings

from skewcat import io
from skewcat.algebra import TWO, find_isomorphism, identity_hom, is_homomorphism, validate
from skewcat.bundles import Bundle, Section, identity_morphism
from skewcat.cli import main
from skewcat.constructions import GeneratorConfig, primitive_left
from skewcat.order import FinitePoset

from conftest import lhsd_algebras

GOLDEN = resources.files("skewcat") / "golden"


def golden(name):
    return str(GOLDEN / name)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, obj, name="in.json"):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


class TestSchemas:
    def test_algebra_round_trip(self):
        obj = primitive_left(3).to_json()
        assert io.algebra_from_json(json.loads(io.dumps(obj))).to_json() == obj

    def test_hom_round_trip(self):
        P = primitive_left(2)
        assert io.hom_from_json(identity_hom(P).to_json(), P, P) == identity_hom(P)

    def test_poset_and_bundle(self):
        B = Bundle(FinitePoset.from_covers(3, [(0, 2)]), (2, 1, 1))
        assert io.bundle_from_json(json.loads(json.dumps(B.to_json()))) == B

    def test_section(self):
        B = Bundle(FinitePoset.chain(2), (2, 2))
        s = Section((1, -1))
        assert io.section_from_json(s.to_json(), B) == s
        with pytest.raises(io.InputError):
            io.section_from_json(Section((-1, 0)).to_json(), B)

    def test_morphism(self):
        B = Bundle(FinitePoset.chain(2), (2, 1))
        m = identity_morphism(B)
        assert io.morphism_from_json(m.to_json(), B, B) == m

    def test_config(self):
        cfg = GeneratorConfig(5, 2, 2, 3, 20)
        assert io.config_from_json(cfg.to_json()) == cfg
        with pytest.raises(io.InputError) as info:
            io.config_from_json({"seed": -1})
        assert info.value.path == "$.seed"

    @pytest.mark.parametrize(
        "obj, path",
        [
            ({"size": 2, "zero": 0, "meet": [[0, 0], [0, "a"]], "join": [[0, 1], [1, 1]]}, "$.meet[1][1]"),
            ({"size": 2, "zero": 0, "meet": [[0, 0], [0, 1]], "join": [[0, 1], [1, 2]]}, "$.join[1][1]"),
            ({"size": 2, "zero": 0, "meet": [[0, 0]], "join": [[0, 1], [1, 1]]}, "$.meet"),
            ({"size": 2, "meet": [[0, 0], [0, 1]], "join": [[0, 1], [1, 1]]}, "$"),
            ({"size": 2, "zero": 5, "meet": [[0, 0], [0, 1]], "join": [[0, 1], [1, 1]]}, "$.zero"),
        ],
    )
    def test_algebra_errors_are_located(self, obj, path):
        with pytest.raises(io.InputError) as info:
            io.algebra_from_json(obj)
        assert info.value.path == path

    def test_bundle_errors_are_located(self):
        with pytest.raises(io.InputError) as info:
            io.bundle_from_json({"poset": {"points": 1, "leq": [[1]]}, "stalks": [1]})
        assert info.value.path == "$.poset.leq[0][0]"
        with pytest.raises(io.InputError) as info:
            io.bundle_from_json({"poset": {"points": 1, "leq": [[True]]}, "stalks": [0]})
        assert info.value.path == "$.stalks[0]"


class TestCommands:
    def test_check_primitive(self, capsys):
        code, out, _ = run(capsys, "check", "--input", golden("primitive_2.json"))
        assert code == 0
        for name in ("left-handed", "strongly distributive", "normal", "symmetric"):
            assert f"{name}: true" in out

    def test_check_corrupted_primitive(self, capsys, tmp_path):
        obj = primitive_left(2).to_json()
        obj["join"][1][2] = 1
        code, out, _ = run(capsys, "check", "--input", write(tmp_path, obj))
        assert code == 1 and "witness" in out and "fails at" in out

    def test_check_right_handed_fails(self, capsys, tmp_path):
        P = primitive_left(2)
        obj = {"size": 3, "zero": 0, "meet": P.meet.T.tolist(), "join": P.join.T.tolist()}
        code, out, _ = run(capsys, "check", "--input", write(tmp_path, obj))
        assert code == 1 and "left-handed: false witness=" in out

    def test_roundtrip_trivial(self, capsys, tmp_path):
        path = write(tmp_path, {"size": 1, "zero": 0, "meet": [[0]], "join": [[0]]})
        code, out, _ = run(capsys, "roundtrip", "--input", path)
        assert code == 0 and "phi: [0]" in out

    def test_roundtrip_bundle(self, capsys):
        code, out, _ = run(capsys, "roundtrip", "--input", golden("bundle_v.json"))
        assert code == 0 and "psi is an isomorphism: true" in out

    def test_dualize_then_sections_is_isomorphic(self, capsys, tmp_path):
        for name in ("primitive_3.json", "partial_maps_2_2.json", "sections_chain2.json"):
            d, s = str(tmp_path / "d.json"), str(tmp_path / "s.json")
            assert run(capsys, "dualize", "--input", golden(name), "--output", d)[0] == 0
            assert run(capsys, "sections", "--input", d, "--output", s)[0] == 0
            original = io.algebra_from_json(io.read_json(golden(name)))
            rebuilt = validate(io.algebra_from_json(io.read_json(s)))
            assert find_isomorphism(original, rebuilt) is not None

    @settings(max_examples=15)
    @given(lhsd_algebras())
    def test_dualize_sections_random(self, S):
        with tempfile.TemporaryDirectory() as tmp:
            src, d, s = (os.path.join(tmp, n) for n in ("a.json", "d.json", "s.json"))
            with open(src, "w") as fh:
                json.dump(S.to_json(), fh)
            with contextlib.redirect_stdout(stdio.StringIO()):
                assert main(["dualize", "--input", src, "--output", d]) == 0
                assert main(["sections", "--input", d, "--output", s]) == 0
            assert find_isomorphism(S, io.algebra_from_json(io.read_json(s))) is not None

    def test_spectrum(self, capsys):
        code, out, _ = run(capsys, "spectrum", "--input", golden("boolean_4.json"), "--format", "json")
        assert code == 0
        summary = json.loads(out.strip().splitlines()[-1])
        X = io.poset_from_json(summary["document"])
        assert X.n == 2 and not X.le(0, 1)

    def test_spectrum_of_poset(self, capsys):
        code, out, _ = run(capsys, "spectrum", "--input", golden("poset_n.json"))
        assert code == 0 and "downsets: 8" in out

    def test_spectrum_rejects_non_lattice(self, capsys):
        code, out, _ = run(capsys, "spectrum", "--input", golden("primitive_2.json"))
        assert code == 1 and "witness" in out

    def test_enumerate(self, capsys):
        code, out, _ = run(capsys, "enumerate", "--input", golden("partial_maps_2_2.json"))
        assert code == 0 and "count: 2" in out

    def test_export_dot(self, capsys):
        code, out, _ = run(capsys, "export-dot", "--input", golden("poset_n.json"), "--format", "dot")
        assert code == 0 and out.startswith("digraph poset {") and "n1 -> n3" in out
        code, out, _ = run(capsys, "export-dot", "--input", golden("bundle_v.json"))
        assert code == 0 and 'label="2 | 2"' in out

    def test_outputs_reparse(self, capsys, tmp_path):
        cases = (("dualize", "primitive_3.json"), ("sections", "bundle_v.json"),
                 ("spectrum", "chain_3.json"), ("enumerate", "primitive_2.json"))
        for cmd, name in cases:
            out = str(tmp_path / f"{cmd}.json")
            assert run(capsys, cmd, "--input", golden(name), "--output", out)[0] == 0
            obj = io.read_json(out)
            if cmd == "enumerate":
                S = io.algebra_from_json(io.read_json(golden(name)))
                homs = [io.hom_from_json(h, S, TWO) for h in obj["homs"]]
                assert all(is_homomorphism(h, S, TWO) for h in homs)
                continue
            kind, value = io.load_any(obj)
            if kind == "algebra":
                validate(value)

    def test_deterministic(self, capsys):
        a = run(capsys, "roundtrip", "--input", golden("partial_maps_2_2.json"), "--format", "json")
        b = run(capsys, "roundtrip", "--input", golden("partial_maps_2_2.json"), "--format", "json")
        assert a == b


class TestExitCodes:
    def test_missing_input(self, capsys):
        assert run(capsys, "check")[0] == 2

    def test_unreadable(self, capsys, tmp_path):
        code, _, err = run(capsys, "check", "--input", str(tmp_path / "nope.json"))
        assert code == 2 and "cannot read" in err

    def test_bad_json(self, capsys, tmp_path):
        p = tmp_path / "x.json"
        p.write_text("{")
        assert run(capsys, "check", "--input", str(p))[0] == 2

    def test_wrong_kind(self, capsys):
        code, _, err = run(capsys, "check", "--input", golden("bundle_v.json"))
        assert code == 2 and "expects algebra" in err

    def test_schema_path_in_message(self, capsys, tmp_path):
        obj = primitive_left(2).to_json()
        obj["meet"][2][0] = 9
        code, _, err = run(capsys, "check", "--input", write(tmp_path, obj))
        assert code == 2 and "$.meet[2][0]" in err

    def test_unknown_command(self, capsys):
        assert run(capsys, "frobnicate")[0] == 2

    def test_size_cap_flag(self, capsys):
        code, out, _ = run(capsys, "dualize", "--input", golden("partial_maps_2_2.json"), "--max-size", "3")
        assert code == 1 and "failure" in out

    def test_size_cap_env(self, capsys, monkeypatch):
        monkeypatch.setenv("SKEWCAT_MAX_SIZE", "3")
        assert run(capsys, "dualize", "--input", golden("partial_maps_2_2.json"))[0] == 1
        monkeypatch.delenv("SKEWCAT_MAX_SIZE")
        assert run(capsys, "dualize", "--input", golden("partial_maps_2_2.json"))[0] == 0
