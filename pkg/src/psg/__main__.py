import sys

from psg.cli import main

sys.exit(main())
