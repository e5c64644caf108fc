from minsumkd.main import cli

cli(prog_name="minsumkd")
