from balance_hpo.cli import cli

cli()
