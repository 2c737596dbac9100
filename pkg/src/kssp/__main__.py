from kssp.cli import main

raise SystemExit(main())
