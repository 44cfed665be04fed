public class BadString
{
    private string label = "no closing quote;

    public void Say()
    {
        System.Console.WriteLine(label);
    }
}
