import sys

from riemopt.main import cli_main

sys.exit(cli_main())
