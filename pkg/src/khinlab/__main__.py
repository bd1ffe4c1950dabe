import sys

from khinlab.cli import main

sys.exit(main())
