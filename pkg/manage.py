"""
Command-line entry point.
Usage: python manage.py run --scenario e0g1 --model jc -o e0g1_jc.csv
       python manage.py figures 3 --output-dir figures
       python manage.py check-truncation --scenario e0123g0123
"""

from app import create_app
from app.cli import SimFlaskGroup, sim_cli

cli = SimFlaskGroup(
    create_app=create_app,
    add_default_commands=False,
    help="Entanglement swapping between two flux-qubit/cavity subsystems.",
)
for name, command in sim_cli.commands.items():
    cli.add_command(command, name)


if __name__ == "__main__":
    cli()
