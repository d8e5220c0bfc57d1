"""Main script for the package."""

from MMWaveMC import cli

cli.cli_main()
