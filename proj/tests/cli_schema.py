"""Validates CLI JSON reports against schemas/cli_report.schema.json."""
import json
import pathlib
import subprocess
import sys

import jsonschema

cli, fixtures, schema_path, data = (pathlib.Path(a) for a in sys.argv[1:5])
schema = json.loads(schema_path.read_text())
validator = jsonschema.Draft202012Validator(schema)


def fx(name, f):
    return str(fixtures / name / f)


runs = []
for name in sorted(p.name for p in fixtures.iterdir() if p.is_dir()):
    urdf = fx(name, "robot.urdf")
    yaml = [fx(name, "robot.yaml")] if (fixtures / name / "robot.yaml").exists() else []
    runs.append(["validate", urdf, *yaml])
    runs.append(["info", "--layout", urdf, *yaml])
    runs.append(["check", urdf, *yaml])
    if yaml:
        runs.append(["project", urdf, *yaml])
    runs.append(["gen-yaml", urdf])
for bad in sorted((data / "urdf_errors").iterdir()):
    runs.append(["validate", str(bad)])
for bad in sorted((data / "yaml_errors").iterdir()):
    runs.append(["validate", fx("four_bar", "robot.urdf"), str(bad)])

failures = 0
for args in runs:
    cmd = [str(cli), args[0], "--json", *args[1:]]
    proc = subprocess.run(cmd, capture_output=True, text=True)
    if args[0] == "gen-yaml":
        continue  # stdout carries the YAML text
    try:
        validator.validate(json.loads(proc.stdout))
    except (json.JSONDecodeError, jsonschema.ValidationError) as e:
        failures += 1
        print("FAIL", " ".join(args), str(e).splitlines()[0])
print(f"{len(runs)} reports checked, {failures} failures")
sys.exit(1 if failures else 0)
