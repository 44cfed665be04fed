public class BadCall
{
    public void Fire(
    {
        Launch(1, 2;
    }
}
