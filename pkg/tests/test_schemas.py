import json

import jsonschema
import pytest
from referencing import Registry, Resource

from switchlab.cli import load_schema, main

SCHEMAS = ["mermin_report", "chain_report", "chain_sweep", "proof_certificate", "suite_result"]


def validator(name):
    registry = Registry().with_resources(
        (f"{n}.json", Resource.from_contents(load_schema(n))) for n in SCHEMAS
    )
    schema = load_schema(name)
    cls = jsonschema.validators.validator_for(schema)
    cls.check_schema(schema)
    return cls(schema, registry=registry)


@pytest.mark.parametrize("name", SCHEMAS)
def test_schemas_are_valid(name):
    validator(name)


@pytest.mark.parametrize("argv,schema", [
    (["ghz-mermin"], "mermin_report"),
    (["ghz-mermin", "--noise", "0.4"], "mermin_report"),
    (["possibilistic"], "proof_certificate"),
    (["possibilistic", "--noise", "0.3"], "proof_certificate"),
    (["chained", "--sweep", "2:6"], "chain_sweep"),
    (["selfcheck", "--seeds", "5"], "suite_result"),
    (["selfcheck", "--seeds", "5", "--timing"], "suite_result"),
])
def test_cli_output_validates(tmp_path, capsys, argv, schema):
    path = tmp_path / "out.json"
    main([*argv, "--json", str(path)])
    capsys.readouterr()
    validator(schema).validate(json.loads(path.read_text()))


def test_schema_rejects_malformed_report():
    with pytest.raises(jsonschema.ValidationError):
        validator("mermin_report").validate({"total": 5})
