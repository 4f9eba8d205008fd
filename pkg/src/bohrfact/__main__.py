import sys

from bohrfact.cli import main

sys.exit(main())
